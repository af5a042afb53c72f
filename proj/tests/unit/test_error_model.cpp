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
#include <random>

#include "varprec/error_model.hpp"

using namespace varprec;

TEST_CASE("table II closed forms") {
  CHECK(propagate_full_precision(ArithOp::add, 1.0, 1.0, 4e-6, 4e-6) == doctest::Approx(2e-6));
  CHECK(propagate_full_precision(ArithOp::add, 3.0, 1.0, 1e-6, 0.0) == doctest::Approx(9e-6 / 16));
  CHECK(propagate_full_precision(ArithOp::sub, 3.0, 1.0, 1e-6, 1e-6) == doctest::Approx(10e-6 / 4));
  CHECK(propagate_full_precision(ArithOp::div, 2.0, 7.0, 1e-6, 2e-6) == doctest::Approx(3e-6));
  CHECK(propagate_full_precision(ArithOp::sqrt, 2.0, 0.0, 4e-6, 0.0) == doctest::Approx(1e-6));
  CHECK(propagate_full_precision(ArithOp::mul, 2.0, 3.0, 1e-6, 1e-6) ==
        doctest::Approx(2e-6).epsilon(1e-5));
  CHECK_THROWS_AS(propagate_full_precision(ArithOp::sub, 2.0, 2.0, 1e-6, 1e-6), SingularityError);
  CHECK_THROWS_AS(propagate_full_precision(ArithOp::add, 2.0, -2.0, 1e-6, 1e-6), SingularityError);
}

TEST_CASE("monte carlo agrees with table II") {
  struct Case { ArithOp op; double a, b; };
  const Case cases[] = {{ArithOp::add, 1.0, 1.0}, {ArithOp::add, 3.0, -1.0},
                        {ArithOp::sub, 5.0, 2.0}, {ArithOp::mul, 1.5, -0.7},
                        {ArithOp::div, 2.0, 0.3}, {ArithOp::sqrt, 6.0, 0.0}};
  for (const Case& c : cases) {
    for (PerturbShape shape : {PerturbShape::uniform, PerturbShape::gaussian}) {
      const auto r = check_full_precision(c.op, c.a, c.b, 1e-3, 200000, 17, shape);
      CHECK(r.rel_dev < 0.03);
    }
  }
  CHECK_THROWS_AS(check_full_precision(ArithOp::add, 1, 1, 1e-3, 1, 1), std::invalid_argument);
}

TEST_CASE("w pdf") {
  CHECK(w_pdf(0.0) == 0.75);
  CHECK(w_pdf(-0.3) == 0.75);
  CHECK(w_pdf(1.0) == 0.0);
  CHECK(w_pdf(-1.0) == 0.0);
  CHECK_THROWS_AS(w_pdf(1.5), std::domain_error);
  CHECK(std::fabs(w_pdf_mass() - 1.0) < 1e-12);
  CHECK(std::fabs(w_pdf_second_moment() - 1.0 / 6.0) < 1e-12);

  // composite Simpson on each smooth piece
  auto simpson = [](auto f, double a, double b) {
    const int n = 20000;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
  };
  auto pdf = [](double w) { return w_pdf(w); };
  auto m2 = [](double w) { return w * w * w_pdf(w); };
  const double mass = 2 * (simpson(pdf, 0.0, 0.5) + simpson(pdf, 0.5, 1.0));
  const double var = 2 * (simpson(m2, 0.0, 0.5) + simpson(m2, 0.5, 1.0));
  CHECK(std::fabs(mass - 1.0) < 1e-9);
  CHECK(std::fabs(var - 1.0 / 6.0) < 1e-9);
}

TEST_CASE("w moments approach the limit") {
  const WMoments m13 = w_moments(13, 400000, 1);
  CHECK(std::fabs(m13.variance - 1.0 / 6.0) < 0.005);
  CHECK(std::fabs(m13.mean) < 0.01);
  CHECK(w_moments(7, 1000, 3).variance == w_moments(7, 1000, 3).variance);
  CHECK_THROWS_AS(w_moments(0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(w_moments(3, 0, 1), std::invalid_argument);
  const WMoments lim = w_moments_limit();
  CHECK(lim.mean == 0.0);
  CHECK(lim.variance == 1.0 / 6.0);
}

TEST_CASE("w moments against exact rounding") {
  // independent estimate: exact significands rounded through the eBFP codec
  std::mt19937_64 rng(99);
  for (int x : {3, 7}) {
    double s = 0, s2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const mpz_class m(static_cast<unsigned long>(rng() >> 12));  // 52 bits
      const ExactRational v = ExactRational::from_scaled(1, m + (mpz_class(1) << 52), -52);
      const ExactRational r = decode(round_to_precision(v, x, kDefaultParams), kDefaultParams);
      const double w = ((v - r) / v).to_double() * std::ldexp(1.0, x + 1);
      s += w;
      s2 += w * w;
    }
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(w_moments(x, 200000, 5).variance == doctest::Approx(var).epsilon(0.04));
  }
}

TEST_CASE("w histogram integrates to one") {
  const auto h = w_histogram(20, 40, 100000, 2);
  double mass = 0;
  for (double v : h) mass += v * 2.0 / 40;
  CHECK(mass == doctest::Approx(1.0));
  // centre bins sit near the 3/4 plateau
  CHECK(h[20] == doctest::Approx(0.75).epsilon(0.05));
}

TEST_CASE("rounding variance") {
  RoundingModel m;
  CHECK(m.r(10) == std::ldexp(1.0, -11));
  CHECK(input_error_variance(10, m) == doctest::Approx(std::ldexp(1.0, -22) / 6));
  CHECK(input_error_variance(60, m) < 1e-36);
  m.table = {{0.0, 0.353}};
  CHECK(input_error_variance(1, m) == doctest::Approx(0.0625 * 0.353));
  for (int x = 4; x < 64; ++x) {
    CHECK(rounding_variance(0.0, x + 1, m) < rounding_variance(0.0, x, m));
  }
  for (int x = 4; x < 20; ++x) {
    CHECK(rounding_variance(1e-6, x + 1, m) < rounding_variance(1e-6, x, m));
  }
  // exact mode carries the mean terms
  const double e = rounding_variance_t<double>(0.5, 0.25, 1.0 / 6, 0.1, true);
  CHECK(e == doctest::Approx((1 + 0.0625 / 6 + 0.05 + 0.0625 * 0.01) * 0.5 + 0.0625 / 6));
  CHECK_THROWS_AS(rounding_variance(0.0, 0, m), std::invalid_argument);
}

TEST_CASE("speculation factors") {
  CHECK(speculation_factor(ArithOp::add, Direction::forward, 8) ==
        doctest::Approx(1.02255).epsilon(1e-5));
  for (int e_b : {5, 8, 11}) {
    CHECK(speculation_factor(ArithOp::add, Direction::forward, e_b) > 1.0);
    CHECK(speculation_factor(ArithOp::add, Direction::backward, e_b) < 1.0);
    CHECK(speculation_factor(ArithOp::sub, Direction::forward, e_b) < 1.0);
    CHECK(speculation_factor(ArithOp::sub, Direction::backward, e_b) > 1.0);
    CHECK(speculation_factor(ArithOp::mul, Direction::backward, e_b) == 1.0);
    CHECK(speculation_factor(ArithOp::div, Direction::forward, e_b) == 1.0);
    CHECK(speculation_factor(ArithOp::sqrt, Direction::backward, e_b) == 0.25);
  }
  CHECK_THROWS_AS(speculation_factor(ArithOp::add, Direction::forward, 1), std::invalid_argument);
}

TEST_CASE("ops per bit") {
  const int add[] = {8, 62, 493};
  const int sub[] = {3, 30, 246};
  const int eb[] = {5, 8, 11};
  for (int i = 0; i < 3; ++i) {
    CHECK(ops_per_bit(ArithOp::add, eb[i]) == add[i]);
    CHECK(ops_per_bit(ArithOp::sub, eb[i]) == sub[i]);
  }
  CHECK_THROWS_AS(ops_per_bit(ArithOp::mul, 8), std::invalid_argument);
}
