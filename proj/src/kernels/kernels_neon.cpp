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


#include "kernels_impl.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace varprec::kernels::neon {

namespace {

float64x2_t apply(ArithOp op, float64x2_t a, float64x2_t b) {
  switch (op) {
    case ArithOp::add: return vaddq_f64(a, b);
    case ArithOp::sub: return vsubq_f64(a, b);
    case ArithOp::mul: return vmulq_f64(a, b);
    case ArithOp::div: return vdivq_f64(a, b);
    case ArithOp::sqrt: return vsqrtq_f64(a);
  }
  return a;
}

}  // namespace

void bits_to_unit_significand(const std::uint64_t* bits, double* out, std::size_t n) {
  const uint64x2_t one = vdupq_n_u64(0x3FF0000000000000ULL);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t u = vorrq_u64(vshrq_n_u64(vld1q_u64(bits + i), 12), one);
    vst1q_f64(out + i, vreinterpretq_f64_u64(u));
  }
  scalar::bits_to_unit_significand(bits + i, out + i, n - i);
}

void round_significand(const double* in, double* out, std::size_t n, int x) {
  const float64x2_t c = vdupq_n_f64(round_constant(x));
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(in + i);
    vst1q_f64(out + i, vsubq_f64(vaddq_f64(v, c), c));
  }
  scalar::round_significand(in + i, out + i, n - i, x);
}

MomentSums w_moment_sums(const double* s, std::size_t n, int x) {
  const float64x2_t c = vdupq_n_f64(round_constant(x));
  const float64x2_t scale = vdupq_n_f64(w_scale(x));
  float64x2_t acc = vdupq_n_f64(0.0);
  float64x2_t acc_sq = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(s + i);
    const float64x2_t r = vsubq_f64(vaddq_f64(v, c), c);
    const float64x2_t w = vmulq_f64(vdivq_f64(vsubq_f64(v, r), v), scale);
    acc = vaddq_f64(acc, w);
    acc_sq = vaddq_f64(acc_sq, vmulq_f64(w, w));
  }
  MomentSums tail = scalar::w_moment_sums(s + i, n - i, x);
  tail.sum += vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  tail.sum_sq += vgetq_lane_f64(acc_sq, 0) + vgetq_lane_f64(acc_sq, 1);
  return tail;
}

void relative_error_batch(ArithOp op, double a, double b, const double* da, const double* db,
                          double c0, double* out, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  const float64x2_t vc = vdupq_n_f64(c0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t av = vmulq_f64(va, vaddq_f64(one, vld1q_f64(da + i)));
    const float64x2_t bv = op == ArithOp::sqrt
                               ? vdupq_n_f64(0.0)
                               : vmulq_f64(vb, vaddq_f64(one, vld1q_f64(db + i)));
    vst1q_f64(out + i, vdivq_f64(vsubq_f64(apply(op, av, bv), vc), vc));
  }
  scalar::relative_error_batch(op, a, b, da + i, db ? db + i : nullptr, c0, out + i, n - i);
}

MomentSums sums(const double* v, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  float64x2_t acc_sq = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(v + i);
    acc = vaddq_f64(acc, x);
    acc_sq = vaddq_f64(acc_sq, vmulq_f64(x, x));
  }
  MomentSums tail = scalar::sums(v + i, n - i);
  tail.sum += vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  tail.sum_sq += vgetq_lane_f64(acc_sq, 0) + vgetq_lane_f64(acc_sq, 1);
  return tail;
}

}  // namespace varprec::kernels::neon

#endif
