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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "varprec/kernels.hpp"

using namespace varprec;
using namespace varprec::kernels;

namespace {

std::vector<SimdLevel> vector_levels() {
  std::vector<SimdLevel> out;
  for (SimdLevel l : {SimdLevel::avx2, SimdLevel::neon}) {
    if (simd_available(l)) out.push_back(l);
  }
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// odd length so every tail path runs
constexpr std::size_t kN = 10007;

std::vector<double> significands(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> bits(kN);
  for (auto& b : bits) b = rng();
  std::vector<double> out(kN);
  bits_to_unit_significand(SimdLevel::scalar, bits.data(), out.data(), kN);
  return out;
}

}  // namespace

TEST_CASE("scalar is always available") {
  CHECK(simd_available(SimdLevel::scalar));
  CHECK(simd_available(active_simd()));
  CHECK_THROWS_AS(sums(SimdLevel::neon, nullptr, 0), std::invalid_argument);
}

TEST_CASE("significands lie in [1, 2)") {
  for (double s : significands(1)) {
    CHECK(s >= 1.0);
    CHECK(s < 2.0);
  }
}

TEST_CASE("scalar rounding matches nearest even") {
  const auto s = significands(2);
  std::vector<double> r(kN);
  for (int x : {1, 5, 13, 30, 50}) {
    round_significand(SimdLevel::scalar, s.data(), r.data(), kN, x);
    const double ulp = std::ldexp(1.0, -x);
    for (std::size_t i = 0; i < kN; ++i) {
      const double k = std::nearbyint(s[i] / ulp);  // default mode is ties-to-even
      REQUIRE(r[i] == k * ulp);
    }
  }
}

TEST_CASE("vector kernels match scalar") {
  std::mt19937_64 rng(3);
  std::vector<std::uint64_t> bits(kN);
  for (auto& b : bits) b = rng();
  std::vector<double> da(kN), db(kN);
  std::normal_distribution<double> nd(0.0, 1e-3);
  for (std::size_t i = 0; i < kN; ++i) {
    da[i] = nd(rng);
    db[i] = nd(rng);
  }

  for (SimdLevel l : vector_levels()) {
    CAPTURE(to_string(l));
    std::vector<double> s0(kN), s1(kN);
    bits_to_unit_significand(SimdLevel::scalar, bits.data(), s0.data(), kN);
    bits_to_unit_significand(l, bits.data(), s1.data(), kN);
    for (std::size_t i = 0; i < kN; ++i) REQUIRE(same_bits(s0[i], s1[i]));

    for (int x = 1; x <= 50; ++x) {
      std::vector<double> r0(kN), r1(kN);
      round_significand(SimdLevel::scalar, s0.data(), r0.data(), kN, x);
      round_significand(l, s0.data(), r1.data(), kN, x);
      for (std::size_t i = 0; i < kN; ++i) REQUIRE(same_bits(r0[i], r1[i]));

      const MomentSums m0 = w_moment_sums(SimdLevel::scalar, s0.data(), kN, x);
      const MomentSums m1 = w_moment_sums(l, s0.data(), kN, x);
      CHECK(m1.sum == doctest::Approx(m0.sum).epsilon(1e-12));
      CHECK(m1.sum_sq == doctest::Approx(m0.sum_sq).epsilon(1e-12));
    }

    for (ArithOp op : {ArithOp::add, ArithOp::sub, ArithOp::mul, ArithOp::div, ArithOp::sqrt}) {
      const double a = 1.75, b = -0.6;
      double c0 = 0;
      switch (op) {
        case ArithOp::add: c0 = a + b; break;
        case ArithOp::sub: c0 = a - b; break;
        case ArithOp::mul: c0 = a * b; break;
        case ArithOp::div: c0 = a / b; break;
        case ArithOp::sqrt: c0 = std::sqrt(a); break;
      }
      std::vector<double> e0(kN), e1(kN);
      relative_error_batch(SimdLevel::scalar, op, a, b, da.data(), db.data(), c0, e0.data(), kN);
      relative_error_batch(l, op, a, b, da.data(), db.data(), c0, e1.data(), kN);
      for (std::size_t i = 0; i < kN; ++i) REQUIRE(same_bits(e0[i], e1[i]));

      const MomentSums t0 = sums(SimdLevel::scalar, e0.data(), kN);
      const MomentSums t1 = sums(l, e0.data(), kN);
      CHECK(t1.sum == doctest::Approx(t0.sum).epsilon(1e-12));
      CHECK(t1.sum_sq == doctest::Approx(t0.sum_sq).epsilon(1e-12));
    }
  }
}

TEST_CASE("short inputs") {
  for (SimdLevel l : vector_levels()) {
    for (std::size_t n = 0; n < 9; ++n) {
      std::vector<double> v(n, 1.5);
      const MomentSums m = sums(l, v.data(), n);
      CHECK(m.sum == doctest::Approx(1.5 * n));
      CHECK(m.sum_sq == doctest::Approx(2.25 * n));
    }
  }
}
