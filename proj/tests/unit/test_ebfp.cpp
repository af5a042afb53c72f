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

#include "varprec/ebfp.hpp"

using namespace varprec;

namespace {

ExactRational q(long n, long d = 1) { return ExactRational(mpz_class(n), mpz_class(d)); }

// Round |v| to `sig` significant bits by scaling and comparing the remainder
// with one half. Deliberately shares nothing with the library's rounding.
ExactRational oracle_round(const ExactRational& v, long sig) {
  if (v.is_zero()) return v;
  mpq_class a = abs(v.raw());
  long e = 0;
  while (a >= 2) { a /= 2; ++e; }
  while (a < 1) { a *= 2; --e; }
  mpq_class scaled = a;
  for (long i = 0; i < sig - 1; ++i) scaled *= 2;
  mpz_class fl = scaled.get_num() / scaled.get_den();
  mpq_class rem = scaled - mpq_class(fl);
  if (rem > mpq_class(1, 2) || (rem == mpq_class(1, 2) && mpz_odd_p(fl.get_mpz_t()))) fl += 1;
  mpq_class out(fl);
  const long shift = e - (sig - 1);
  for (long i = 0; i < std::labs(shift); ++i) {
    if (shift > 0) out *= 2; else out /= 2;
  }
  if (v.sign() < 0) out = -out;
  return ExactRational(out);
}

ExactRational random_dyadic(std::mt19937_64& rng, int bits, int spread) {
  std::uniform_int_distribution<int> e(-spread, spread);
  mpz_class m;
  mpz_set_ui(m.get_mpz_t(), rng() >> (64 - bits));
  if (m == 0) m = 1;
  return ExactRational::from_scaled(rng() & 1 ? -1 : 1, m, e(rng));
}

}  // namespace

TEST_CASE("params") {
  CHECK(kDefaultParams.bias() == 255);
  CHECK(kDefaultParams.max_code() == 511);
  CHECK_THROWS_AS(EbfpParams({0, 10, 128}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(EbfpParams({1, 1, 128}).validate(), std::invalid_argument);
}

TEST_CASE("encode one") {
  const EbfpNumber n = encode(1, kDefaultParams, 4);
  CHECK(n.exp_code() == 256);
  CHECK(n.blocks() == std::vector<std::uint32_t>{1, 0, 0, 0});
  CHECK(decode(n, kDefaultParams) == ExactRational(1));
}

TEST_CASE("encode zero") {
  const EbfpNumber n = encode(0, kDefaultParams, 5);
  CHECK(n.is_zero());
  CHECK(n.exp_code() == 0);
  for (auto b : n.blocks()) CHECK(b == 0);
  CHECK(decode(n, kDefaultParams).is_zero());
}

TEST_CASE("block alignment with F=8") {
  const EbfpParams p{8, 8, 16};
  // top set bit is bit 56 (57 bits left of the point) -> block No. 7
  mpz_class m = 1;
  m <<= 56;
  m += mpz_class(0x3C) << 40;
  const EbfpNumber n = encode(ExactRational::from_scaled(1, m, 0), p, 3);
  CHECK(n.exponent(p) == 8);  // e = ceil(57 / 8)
  CHECK(n.exp_code() == 8 + 63);
  CHECK(n.leading_zeros(p) == 7);
  CHECK(n.blocks() == std::vector<std::uint32_t>{0x01, 0x00, 0x3C});
}

TEST_CASE("round trip on representable values") {
  CHECK(decode(encode(q(3, 4), kDefaultParams, 4), kDefaultParams) == q(3, 4));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const ExactRational v = random_dyadic(rng, 20, 60);
    CHECK(decode(encode(v, kDefaultParams, 20), kDefaultParams) == v);
  }
}

TEST_CASE("one third at five blocks") {
  // brute force over all 5-bit significands
  const ExactRational third = q(1, 3);
  ExactRational best;
  mpq_class gap = 1;
  for (long m = 16; m < 32; ++m) {
    const mpq_class c(m, 64);
    const mpq_class d = abs(c - third.raw());
    if (d < gap) { gap = d; best = ExactRational(c); }
  }
  CHECK(best == q(21, 64));
  CHECK(decode(encode(third, kDefaultParams, 5), kDefaultParams) == best);
}

TEST_CASE("ties go to even") {
  for (int x = 1; x < 12; ++x) {
    const ExactRational mid = ExactRational::from_scaled(1, (mpz_class(1) << (x + 1)) + 1, -(x + 1));
    CHECK(decode(round_to_precision(mid, x, kDefaultParams), kDefaultParams) == ExactRational(1));
    const ExactRational odd_mid =
        ExactRational::from_scaled(1, (mpz_class(1) << (x + 1)) + 3, -(x + 1));
    CHECK(decode(round_to_precision(odd_mid, x, kDefaultParams), kDefaultParams) ==
          ExactRational::from_scaled(1, (mpz_class(1) << x) + 2, -x));
  }
}

TEST_CASE("round_to_precision matches oracle and bound") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> num(1, 1L << 40);
  for (int i = 0; i < 5000; ++i) {
    const int x = 1 + static_cast<int>(rng() % 30);
    const ExactRational v(mpz_class(num(rng)) * (rng() & 1 ? 1 : -1), mpz_class(num(rng)));
    const ExactRational r = decode(round_to_precision(v, x, kDefaultParams), kDefaultParams);
    REQUIRE(r == oracle_round(v, x + 1));
    CHECK(relative_error(r, v) <= std::ldexp(1.0, -x - 1));
  }
  CHECK(round_to_precision(q(5), 3, kDefaultParams).n_blocks() == 4);
  CHECK_THROWS_AS(round_to_precision(q(5), 0, kDefaultParams), std::invalid_argument);
  CHECK_THROWS_AS(round_to_precision(q(5), 200, kDefaultParams), std::invalid_argument);
}

TEST_CASE("saturation") {
  const ExactRational huge = ExactRational::from_scaled(1, 1, 400);
  const ExactRational tiny = ExactRational::from_scaled(1, 1, -400);
  CHECK(encode(huge, kDefaultParams, 4).flag() == EbfpFlag::overflow);
  CHECK(encode(tiny, kDefaultParams, 4).flag() == EbfpFlag::underflow);
  CHECK_THROWS_AS(decode(encode(huge, kDefaultParams, 4), kDefaultParams), NotRepresentable);
  const EbfpNumber one = round_to_precision(1, 8, kDefaultParams);
  const EbfpNumber ovf = EbfpNumber::saturated(EbfpFlag::overflow, 1);
  for (ArithOp op : {ArithOp::add, ArithOp::sub, ArithOp::mul, ArithOp::div}) {
    CHECK(arith(op, one, ovf, 8, kDefaultParams).is_saturated());
    CHECK(arith(op, ovf, one, 8, kDefaultParams).is_saturated());
  }
  CHECK(arith(ArithOp::sqrt, ovf, nullptr, 8, kDefaultParams).is_saturated());
  // products leaving the range saturate too
  const EbfpNumber big = round_to_precision(ExactRational::from_scaled(1, 1, 200), 8, kDefaultParams);
  CHECK(arith(ArithOp::mul, big, big, 8, kDefaultParams).flag() == EbfpFlag::overflow);
}

TEST_CASE("arith examples") {
  const auto& p = kDefaultParams;
  auto r = [&](const ExactRational& v) { return round_to_precision(v, 20, p); };
  CHECK(decode(arith(ArithOp::add, r(1), r(1), 3, p), p) == ExactRational(2));
  CHECK(decode(arith(ArithOp::mul, r(q(3, 4)), r(q(5, 2)), 8, p), p) == q(15, 8));
  CHECK(decode(arith(ArithOp::div, r(1), r(3), 10, p), p) == oracle_round(q(1, 3), 11));
  CHECK(decode(arith(ArithOp::sqrt, r(q(9, 4)), nullptr, 10, p), p) == q(3, 2));
  CHECK_THROWS_AS(arith(ArithOp::div, r(1), r(0), 10, p), std::domain_error);
  CHECK_THROWS_AS(arith(ArithOp::sqrt, r(-1), nullptr, 10, p), std::domain_error);
  CHECK(arith(ArithOp::sub, r(q(5, 4)), r(q(5, 4)), 10, p).is_zero());
}

TEST_CASE("add sub mul agree with oracle") {
  std::mt19937_64 rng(3);
  const auto& p = kDefaultParams;
  for (int i = 0; i < 3000; ++i) {
    const int x = 1 + static_cast<int>(rng() % 40);
    const ExactRational a = random_dyadic(rng, 30, 20);
    const ExactRational b = random_dyadic(rng, 30, 20);
    const EbfpNumber ea = encode(a, p, 30);
    const EbfpNumber eb = encode(b, p, 30);
    CHECK(decode(arith(ArithOp::add, ea, eb, x, p), p) == oracle_round(a + b, x + 1));
    CHECK(decode(arith(ArithOp::sub, ea, eb, x, p), p) == oracle_round(a - b, x + 1));
    CHECK(decode(arith(ArithOp::mul, ea, eb, x, p), p) == oracle_round(a * b, x + 1));
  }
}

TEST_CASE("div is correctly rounded") {
  std::mt19937_64 rng(5);
  const auto& p = kDefaultParams;
  for (int i = 0; i < 2000; ++i) {
    const int x = 1 + static_cast<int>(rng() % 40);
    const ExactRational a = random_dyadic(rng, 30, 10);
    const ExactRational b = random_dyadic(rng, 30, 10);
    CHECK(decode(arith(ArithOp::div, encode(a, p, 30), encode(b, p, 30), x, p), p) ==
          oracle_round(a / b, x + 1));
  }
}

TEST_CASE("sqrt is correctly rounded") {
  std::mt19937_64 rng(9);
  const auto& p = kDefaultParams;
  for (int i = 0; i < 500; ++i) {
    const ExactRational a = random_dyadic(rng, 30, 10).abs();
    // floor(sqrt(a) * 2^200) via integer square root; a = m * 2^e
    const mpz_class den = a.denominator();
    const long e = -static_cast<long>(mpz_scan1(den.get_mpz_t(), 0));
    mpz_class m = a.numerator();
    long shift = 400 + e;  // even-adjusted exponent of m * 2^shift
    if (shift & 1) { m <<= 1; --shift; }
    mpz_class scaled = m << shift;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    const ExactRational approx = ExactRational::from_scaled(1, root, -200);
    double prev = 1.0;
    for (int x = 1; x <= 40; ++x) {
      const ExactRational s = decode(arith(ArithOp::sqrt, encode(a, p, 30), nullptr, x, p), p);
      CHECK(s == oracle_round(approx, x + 1));
      const double rel = relative_error(s, approx);
      CHECK(rel <= prev);
      prev = rel;
    }
  }
}

TEST_CASE("fraction bits and block count") {
  const EbfpNumber n = round_to_precision(q(3, 2), 6, kDefaultParams);
  CHECK(n.n_blocks() == 7);
  CHECK(n.fraction_bits(kDefaultParams) == 6);
  CHECK(guard_bits(kDefaultParams) == 4);
}

TEST_CASE("text form") {
  const auto& p = kDefaultParams;
  const EbfpNumber n = round_to_precision(q(-5, 8), 3, p);
  const std::string s = to_text(n, p);
  CHECK(s == "-|255|1.0.1.0");
  CHECK(from_text(s, p) == n);
  const EbfpNumber o = EbfpNumber::saturated(EbfpFlag::overflow, 1);
  CHECK(to_text(o, p) == "+|ovf|");
  CHECK(from_text("+|ovf|", p) == o);
  CHECK_THROWS_AS(from_text("+|12|zz", p), std::invalid_argument);
  const EbfpParams p8{8, 8, 16};
  const EbfpNumber m = encode(q(300), p8, 2);
  CHECK(to_text(m, p8) == "+|65|01.2c");
  CHECK(from_text(to_text(m, p8), p8) == m);
}

TEST_CASE("spec table") {
  const EbfpParams p{8, 8, 16};
  const SpecRow r3 = spec_table(p, 3);
  CHECK(r3.total_bits == 24);
  CHECK(r3.exponent_bits == 7);
  CHECK(r3.fraction_bits == 16);
  CHECK(r3.log10_max == doctest::Approx(154.13).epsilon(1e-4));
  CHECK(spec_table(p, 5).worst_rel_error == doctest::Approx(1.48e-8).epsilon(0.05));
  CHECK(spec_table(p, 9).worst_rel_error == doctest::Approx(3.46e-18).epsilon(0.05));
}
