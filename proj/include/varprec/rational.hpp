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

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

namespace varprec {

/// Exact rational number in canonical form (gcd(num, den) = 1, den > 0).
///
/// This is the "full precision" substrate: every value the variable
/// precision arithmetic produces is first formed exactly here and only then
/// rounded.  Values built from doubles are dyadic and conversion is exact.
class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(long v) : q_(v) {}  // NOLINT(implicit)
  ExactRational(int v) : q_(static_cast<long>(v)) {}  // NOLINT(implicit)
  explicit ExactRational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
  ExactRational(const mpz_class& num, const mpz_class& den);

  /// Exact conversion of a finite double. Throws std::domain_error on NaN/inf.
  static ExactRational from_double(double v);
  /// sign * mag * 2^exp2
  static ExactRational from_scaled(int sign, const mpz_class& mag, long exp2);
  /// Parses "p/q", "p", or a decimal literal such as "-1.25e3".
  static ExactRational parse(const std::string& text);

  const mpq_class& raw() const { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  /// True when the denominator is a power of two.
  bool is_dyadic() const;
  /// floor(log2 |q|); requires q != 0.
  long floor_log2_abs() const;

  double to_double() const;
  std::string to_string() const { return q_.get_str(); }

  ExactRational abs() const { return ExactRational(::abs(q_)); }
  ExactRational operator-() const { return ExactRational(mpq_class(-q_)); }

  friend ExactRational operator+(const ExactRational& a, const ExactRational& b) {
    return ExactRational(mpq_class(a.q_ + b.q_));
  }
  friend ExactRational operator-(const ExactRational& a, const ExactRational& b) {
    return ExactRational(mpq_class(a.q_ - b.q_));
  }
  friend ExactRational operator*(const ExactRational& a, const ExactRational& b) {
    return ExactRational(mpq_class(a.q_ * b.q_));
  }
  /// Throws std::domain_error when b == 0.
  friend ExactRational operator/(const ExactRational& a, const ExactRational& b);

  friend bool operator==(const ExactRational& a, const ExactRational& b) {
    return a.q_ == b.q_;
  }
  friend std::strong_ordering operator<=>(const ExactRational& a,
                                          const ExactRational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

 private:
  mpq_class q_;
};

/// |a - b| / |b| as a double; b must be nonzero.
double relative_error(const ExactRational& approx, const ExactRational& exact);

}  // namespace varprec
