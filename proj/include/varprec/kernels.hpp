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

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "varprec/ebfp.hpp"

namespace varprec::kernels {

// Monte Carlo inner loops over host doubles. Each kernel has a scalar
// reference and vector variants; elementwise kernels are bit-identical
// across variants, reductions agree to rounding of the summation order.

enum class SimdLevel { scalar, avx2, neon };

std::string_view to_string(SimdLevel level);

/// True when the level was compiled in and the CPU supports it.
bool simd_available(SimdLevel level);

/// Best available level, or the one named by VARPREC_SIMD (scalar, avx2, neon)
/// when that is available. Resolved once.
SimdLevel active_simd();

/// Uniform significands in [1, 2): 1 + (bits >> 12) * 2^-52.
void bits_to_unit_significand(SimdLevel level, const std::uint64_t* bits, double* out,
                              std::size_t n);

/// Round values in [1, 2) to x fraction bits, ties to even. 1 <= x <= 50.
void round_significand(SimdLevel level, const double* in, double* out, std::size_t n, int x);

struct MomentSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

/// Sums of W = (X - round_x(X)) / X * 2^(x+1) for X in [1, 2).
MomentSums w_moment_sums(SimdLevel level, const double* significands, std::size_t n, int x);

/// out[i] = (op(a*(1+da[i]), b*(1+db[i])) - c0) / c0. sqrt ignores b and db.
void relative_error_batch(SimdLevel level, ArithOp op, double a, double b, const double* da,
                          const double* db, double c0, double* out, std::size_t n);

/// Sums of v and v^2.
MomentSums sums(SimdLevel level, const double* v, std::size_t n);

}  // namespace varprec::kernels
