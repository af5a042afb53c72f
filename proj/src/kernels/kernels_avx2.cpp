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

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace varprec::kernels::avx2 {

namespace {

double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

__m256d apply(ArithOp op, __m256d a, __m256d b) {
  switch (op) {
    case ArithOp::add: return _mm256_add_pd(a, b);
    case ArithOp::sub: return _mm256_sub_pd(a, b);
    case ArithOp::mul: return _mm256_mul_pd(a, b);
    case ArithOp::div: return _mm256_div_pd(a, b);
    case ArithOp::sqrt: return _mm256_sqrt_pd(a);
  }
  return a;
}

}  // namespace

void bits_to_unit_significand(const std::uint64_t* bits, double* out, std::size_t n) {
  const __m256i one = _mm256_set1_epi64x(0x3FF0000000000000LL);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i u = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    u = _mm256_or_si256(_mm256_srli_epi64(u, 12), one);
    _mm256_storeu_pd(out + i, _mm256_castsi256_pd(u));
  }
  scalar::bits_to_unit_significand(bits + i, out + i, n - i);
}

void round_significand(const double* in, double* out, std::size_t n, int x) {
  const __m256d c = _mm256_set1_pd(round_constant(x));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(in + i);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_add_pd(v, c), c));
  }
  scalar::round_significand(in + i, out + i, n - i, x);
}

MomentSums w_moment_sums(const double* s, std::size_t n, int x) {
  const __m256d c = _mm256_set1_pd(round_constant(x));
  const __m256d scale = _mm256_set1_pd(w_scale(x));
  __m256d acc = _mm256_setzero_pd();
  __m256d acc_sq = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(s + i);
    const __m256d r = _mm256_sub_pd(_mm256_add_pd(v, c), c);
    const __m256d w = _mm256_mul_pd(_mm256_div_pd(_mm256_sub_pd(v, r), v), scale);
    acc = _mm256_add_pd(acc, w);
    acc_sq = _mm256_add_pd(acc_sq, _mm256_mul_pd(w, w));
  }
  MomentSums tail = scalar::w_moment_sums(s + i, n - i, x);
  tail.sum += hsum(acc);
  tail.sum_sq += hsum(acc_sq);
  return tail;
}

void relative_error_batch(ArithOp op, double a, double b, const double* da, const double* db,
                          double c0, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vc = _mm256_set1_pd(c0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_mul_pd(va, _mm256_add_pd(one, _mm256_loadu_pd(da + i)));
    const __m256d bv = op == ArithOp::sqrt
                           ? _mm256_setzero_pd()
                           : _mm256_mul_pd(vb, _mm256_add_pd(one, _mm256_loadu_pd(db + i)));
    const __m256d r = apply(op, av, bv);
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_sub_pd(r, vc), vc));
  }
  scalar::relative_error_batch(op, a, b, da + i, db ? db + i : nullptr, c0, out + i, n - i);
}

MomentSums sums(const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  __m256d acc_sq = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    acc = _mm256_add_pd(acc, x);
    acc_sq = _mm256_add_pd(acc_sq, _mm256_mul_pd(x, x));
  }
  MomentSums tail = scalar::sums(v + i, n - i);
  tail.sum += hsum(acc);
  tail.sum_sq += hsum(acc_sq);
  return tail;
}

}  // namespace varprec::kernels::avx2

#endif
