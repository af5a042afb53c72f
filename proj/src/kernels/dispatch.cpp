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


#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace varprec::kernels {

namespace {

SimdLevel resolve() {
  SimdLevel best = SimdLevel::scalar;
  if (simd_available(SimdLevel::avx2)) best = SimdLevel::avx2;
  if (simd_available(SimdLevel::neon)) best = SimdLevel::neon;
  if (const char* env = std::getenv("VARPREC_SIMD")) {
    const std::string want(env);
    for (SimdLevel l : {SimdLevel::scalar, SimdLevel::avx2, SimdLevel::neon}) {
      if (want == to_string(l) && simd_available(l)) return l;
    }
  }
  return best;
}

void check(SimdLevel level) {
  if (!simd_available(level)) {
    throw std::invalid_argument("SIMD level not available: " + std::string(to_string(level)));
  }
}

}  // namespace

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar: return "scalar";
    case SimdLevel::avx2: return "avx2";
    case SimdLevel::neon: return "neon";
  }
  return "?";
}

bool simd_available(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return true;
    case SimdLevel::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case SimdLevel::neon:
#if defined(__aarch64__) && defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

SimdLevel active_simd() {
  static const SimdLevel level = resolve();
  return level;
}

#if defined(__x86_64__) || defined(__i386__)
#define VARPREC_AVX2_CASE(call) \
  case SimdLevel::avx2:         \
    return avx2::call;
#else
#define VARPREC_AVX2_CASE(call)
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define VARPREC_NEON_CASE(call) \
  case SimdLevel::neon:         \
    return neon::call;
#else
#define VARPREC_NEON_CASE(call)
#endif

#define VARPREC_DISPATCH(level, call) \
  do {                                \
    check(level);                     \
    switch (level) {                  \
      VARPREC_AVX2_CASE(call)         \
      VARPREC_NEON_CASE(call)         \
      default:                        \
        break;                        \
    }                                 \
    return scalar::call;              \
  } while (0)

void bits_to_unit_significand(SimdLevel level, const std::uint64_t* bits, double* out,
                              std::size_t n) {
  VARPREC_DISPATCH(level, bits_to_unit_significand(bits, out, n));
}

void round_significand(SimdLevel level, const double* in, double* out, std::size_t n, int x) {
  if (x < 1 || x > 50) throw std::invalid_argument("round_significand: x must be in [1, 50]");
  VARPREC_DISPATCH(level, round_significand(in, out, n, x));
}

MomentSums w_moment_sums(SimdLevel level, const double* significands, std::size_t n, int x) {
  if (x < 1 || x > 50) throw std::invalid_argument("w_moment_sums: x must be in [1, 50]");
  VARPREC_DISPATCH(level, w_moment_sums(significands, n, x));
}

void relative_error_batch(SimdLevel level, ArithOp op, double a, double b, const double* da,
                          const double* db, double c0, double* out, std::size_t n) {
  VARPREC_DISPATCH(level, relative_error_batch(op, a, b, da, db, c0, out, n));
}

MomentSums sums(SimdLevel level, const double* v, std::size_t n) {
  VARPREC_DISPATCH(level, sums(v, n));
}

#undef VARPREC_DISPATCH
#undef VARPREC_AVX2_CASE
#undef VARPREC_NEON_CASE

}  // namespace varprec::kernels
