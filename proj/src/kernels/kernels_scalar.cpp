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


#include <cmath>
#include <cstring>

#include "kernels_impl.hpp"

namespace varprec::kernels::scalar {

void bits_to_unit_significand(const std::uint64_t* bits, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t u = (bits[i] >> 12) | 0x3FF0000000000000ULL;
    std::memcpy(&out[i], &u, sizeof u);
  }
}

void round_significand(const double* in, double* out, std::size_t n, int x) {
  const double c = round_constant(x);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (in[i] + c) - c;
  }
}

MomentSums w_moment_sums(const double* s, std::size_t n, int x) {
  const double c = round_constant(x);
  const double scale = w_scale(x);
  MomentSums m;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (s[i] + c) - c;
    const double w = (s[i] - r) / s[i] * scale;
    m.sum += w;
    m.sum_sq += w * w;
  }
  return m;
}

double apply(ArithOp op, double a, double b) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
    case ArithOp::sqrt: return std::sqrt(a);
  }
  return 0.0;
}

void relative_error_batch(ArithOp op, double a, double b, const double* da, const double* db,
                          double c0, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double av = a * (1.0 + da[i]);
    const double bv = op == ArithOp::sqrt ? 0.0 : b * (1.0 + db[i]);
    out[i] = (apply(op, av, bv) - c0) / c0;
  }
}

MomentSums sums(const double* v, std::size_t n) {
  MomentSums m;
  for (std::size_t i = 0; i < n; ++i) {
    m.sum += v[i];
    m.sum_sq += v[i] * v[i];
  }
  return m;
}

}  // namespace varprec::kernels::scalar
