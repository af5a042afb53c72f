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

#include "varprec/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace varprec {

ExactRational::ExactRational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("ExactRational: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

ExactRational ExactRational::from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("ExactRational: non-finite double");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), v);  // exact for finite doubles
  return ExactRational(std::move(q));
}

ExactRational ExactRational::from_scaled(int sign, const mpz_class& mag, long exp2) {
  mpq_class q(mag);
  if (exp2 >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exp2));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exp2));
  }
  if (sign < 0) q = -q;
  return ExactRational(std::move(q));
}

ExactRational ExactRational::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("ExactRational: empty literal");
  if (text.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(text, 10) != 0) {
      throw std::invalid_argument("ExactRational: bad literal '" + text + "'");
    }
    if (q.get_den() == 0) throw std::domain_error("ExactRational: zero denominator");
    return ExactRational(std::move(q));
  }

  // decimal literal: [sign] digits [. digits] [e exp]
  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_dot = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) --scale;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (digits.empty()) throw std::invalid_argument("ExactRational: bad literal '" + text + "'");
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') {
      throw std::invalid_argument("ExactRational: bad literal '" + text + "'");
    }
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(text.substr(i + 1), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("ExactRational: bad exponent in '" + text + "'");
    }
    if (used != text.size() - i - 1) {
      throw std::invalid_argument("ExactRational: bad exponent in '" + text + "'");
    }
    scale += e;
  }
  mpz_class num(digits, 10);
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  mpq_class q = scale >= 0 ? mpq_class(num * p) : mpq_class(num, p);
  q.canonicalize();
  if (neg) q = -q;
  return ExactRational(std::move(q));
}

bool ExactRational::is_dyadic() const {
  const mpz_class& d = q_.get_den();
  return mpz_popcount(d.get_mpz_t()) == 1;
}

long ExactRational::floor_log2_abs() const {
  if (is_zero()) throw std::domain_error("floor_log2_abs of zero");
  const mpz_class num = ::abs(q_.get_num());
  const mpz_class& den = q_.get_den();
  long guess = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
               static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  // 2^guess is within a factor 2 of |q|; correct by one comparison.
  mpz_class lhs = num;
  mpz_class rhs = den;
  if (guess >= 0) {
    rhs <<= static_cast<mp_bitcnt_t>(guess);
  } else {
    lhs <<= static_cast<mp_bitcnt_t>(-guess);
  }
  if (lhs < rhs) --guess;
  return guess;
}

double ExactRational::to_double() const { return q_.get_d(); }

ExactRational operator/(const ExactRational& a, const ExactRational& b) {
  if (b.is_zero()) throw std::domain_error("ExactRational: division by zero");
  return ExactRational(mpq_class(a.q_ / b.q_));
}

double relative_error(const ExactRational& approx, const ExactRational& exact) {
  if (exact.is_zero()) throw std::domain_error("relative_error: zero reference");
  const mpq_class d = ::abs(approx.raw() - exact.raw()) / ::abs(exact.raw());
  return d.get_d();
}

}  // namespace varprec
