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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "varprec/ebfp.hpp"

namespace varprec {

/// Relative error statistics of one value.
struct RelErrorStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Thrown when a relative-error frame has a zero denominator.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Variance of the exact result's relative error given operand variances.
/// Throws SingularityError if a+b (add) or a-b (sub) is zero.
double propagate_full_precision(ArithOp op, double a, double b, double sa2, double sb2);

struct WMoments {
  double mean = 0.0;
  double variance = 1.0 / 6.0;
};

/// Rounding-error model with base eps. Moments per x come from `table`
/// (index x-1) when present and fall back to the limit (0, 1/6).
struct RoundingModel {
  double eps = 2.0;
  std::vector<WMoments> table;

  double r(int x) const { return std::pow(eps, -x - 1.0); }
  WMoments moments(int x) const;
};

/// Rounding variance in any field type T (double, ExactRational, ...).
template <class T>
T rounding_variance_t(const T& sc2, const T& r, const T& w_var, const T& w_mean, bool exact) {
  const T r2 = r * r;
  if (!exact) return (T(1) + r2 * w_var) * sc2 + r2 * w_var;
  return (T(1) + r2 * w_var + T(2) * r * w_mean + r2 * w_mean * w_mean) * sc2 + r2 * w_var;
}

/// Variance after rounding a value whose relative error has variance sc2
/// to x fraction bits. `exact` keeps the E[W] terms.
double rounding_variance(double sc2, int x, const RoundingModel& model, bool exact = false);

/// Limiting density of W (symmetric reading): 3/4 on |w| <= 1/2,
/// (1/4)(1/w^2 - 1) on 1/2 < |w| <= 1. Throws std::domain_error for |w| > 1.
double w_pdf(double w);

/// Integrals of the limiting density over [-1, 1] from its antiderivative.
double w_pdf_mass();
double w_pdf_second_moment();

/// Monte Carlo moments of W at x fraction bits over `samples` uniform
/// significands. Deterministic for a given seed.
WMoments w_moments(int x, std::uint64_t samples, std::uint64_t seed);

/// Limit as x grows: mean 0, variance 1/6.
inline WMoments w_moments_limit() { return {0.0, 1.0 / 6.0}; }

/// Empirical density of W at x: `bins` equal bins over [-1, 1].
std::vector<double> w_histogram(int x, int bins, std::uint64_t samples, std::uint64_t seed);

enum class Direction { forward, backward };

/// Expected change factor of the error-variance sensitivity across one
/// operation for a float with e_b exponent bits. Forward factors of
/// mul/div/sqrt are the reciprocals of the backward ones.
double speculation_factor(ArithOp op, Direction dir, int e_b);

/// Operations of `op` (add or sub) needed to move x^opt by one bit.
int ops_per_bit(ArithOp op, int e_b, double eps = 2.0);

/// Variance of a stored input at x_in fraction bits.
double input_error_variance(int x_in, const RoundingModel& model);

enum class PerturbShape { uniform, gaussian };

struct FullPrecisionCheck {
  ArithOp op;
  double a;
  double b;
  double formula_variance;
  double empirical_variance;
  double rel_dev;
  std::uint64_t samples;
  std::uint64_t seed;
};

/// Injects zero-mean relative perturbations of standard deviation sigma into
/// both operands and measures the variance of the result's relative error.
FullPrecisionCheck check_full_precision(ArithOp op, double a, double b, double sigma,
                                        std::uint64_t samples, std::uint64_t seed,
                                        PerturbShape shape = PerturbShape::uniform);

}  // namespace varprec
