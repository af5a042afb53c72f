// Copyright 2026 The varprec Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "varprec/kernels.hpp"

namespace varprec::kernels {

#define VARPREC_KERNEL_DECLS                                                               \
  void bits_to_unit_significand(const std::uint64_t* bits, double* out, std::size_t n);    \
  void round_significand(const double* in, double* out, std::size_t n, int x);             \
  MomentSums w_moment_sums(const double* s, std::size_t n, int x);                         \
  void relative_error_batch(ArithOp op, double a, double b, const double* da,              \
                            const double* db, double c0, double* out, std::size_t n);      \
  MomentSums sums(const double* v, std::size_t n);

namespace scalar {
VARPREC_KERNEL_DECLS
}
namespace avx2 {
VARPREC_KERNEL_DECLS
}
namespace neon {
VARPREC_KERNEL_DECLS
}

#undef VARPREC_KERNEL_DECLS

// shared by every variant so tails match the reference exactly
inline double round_constant(int x) {
  // 1.5 * 2^(52-x): adding and subtracting it rounds [1,2) to 2^-x steps
  return 3.0 * static_cast<double>(1ULL << (51 - x));
}

inline double w_scale(int x) { return static_cast<double>(1ULL << (x + 1)); }

}  // namespace varprec::kernels
