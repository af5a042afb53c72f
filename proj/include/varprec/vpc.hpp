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

#include <array>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "varprec/expr_graph.hpp"

namespace varprec {

/// Cost o_u(x) = w_u * x per operation kind.
struct ComplexityModel {
  // input, add, sub, mul, div, sqrt
  std::array<double, 6> weights{0.0, 1.0, 1.0, 30.0, 30.0, 80.0};

  double weight(OpKind op) const { return weights[static_cast<std::size_t>(op)]; }
  double cost(OpKind op, int x) const { return weight(op) * x; }
  /// Throws std::invalid_argument unless every arithmetic weight is > 0.
  void validate() const;
};

struct UtilityConfig {
  double alpha = 1e-9;             // complexity weight G_o
  double eps = 2.0;                // storage base
  int x_min = 4;
  int x_max = 64;
  std::vector<double> out_weights; // beta per output, empty means all 1
  double w_var = 1.0 / 6.0;        // sigma_W^2 used while planning
  int e_b = 10;                    // exponent bits of the modeled float

  double beta(std::size_t output_index) const;
  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
  /// dG/dsigma_t^2 to dG/dx conversion: -2 ln(eps) eps^-2 sigma_W^2.
  double sigma_coefficient() const;
};

/// x^opt as a function of rho = -G_sigma / G_o.
///
/// The utility of one operation, divided by G_o, is
///   g(x) = rho * eps^(-2x) / (2 ln eps) + w_u * x,
/// so x+1 beats x exactly when rho > T_u(x) = w_u 2 ln(eps) eps^(2x) / (1 - eps^-2).
class XoptLut {
 public:
  XoptLut(const ComplexityModel& cm, const UtilityConfig& cfg);

  int x_min() const { return x_min_; }
  int x_max() const { return x_max_; }
  double threshold(OpKind op, int x) const;
  /// rho where the continuous utility is stationary at x: w_u eps^(2x).
  double stationary_rho(OpKind op, int x) const;
  /// Smallest x in [x_min, x_max] with rho <= T_u(x), else x_max.
  int lookup(OpKind op, double rho) const;
  /// Geometric midpoint of the rho interval that maps to x.
  double reverse(OpKind op, int x) const;

 private:
  ComplexityModel cm_;
  double eps_;
  int x_min_;
  int x_max_;
  double log_eps2_;
  double scale_;  // 2 ln(eps) / (1 - eps^-2)
};

struct FinalStep {
  std::vector<double> g_sigma;  // per output, in outputs() order
  double g_o = 0.0;
  std::vector<int> x;
};

FinalStep final_step_precision(const ExprGraph& g, const UtilityConfig& cfg,
                               const ComplexityModel& cm);

/// Reverse sweep with expected backward factors; runs before any value exists.
PrecisionPlan offline_vpc(const ExprGraph& g, const UtilityConfig& cfg, const ComplexityModel& cm);

struct OnlineResult {
  ExecutionResult exec;
  PrecisionPlan plan;
};

/// Plans each node from its operands' known values, then runs it.
OnlineResult online_vpc(const ExprGraph& g, const UtilityConfig& cfg, const ComplexityModel& cm,
                        const std::vector<ExactRational>& input_values,
                        const std::vector<int>& input_precision, const ExecOptions& opt = {});

PrecisionPlan fixed_plan(const ExprGraph& g, int x);

/// One uniform draw from [lo, hi] per part label. Throws GraphError for an
/// arithmetic node without a part label.
PrecisionPlan random_blockwise_plan(const ExprGraph& g, std::mt19937_64& rng, int lo, int hi);

struct PlanMetrics {
  double avg_bits = 0.0;
  double total_complexity = 0.0;
};

PlanMetrics plan_metrics(const ExprGraph& g, const PrecisionPlan& plan, const ComplexityModel& cm);

/// Header `node_id,op,step_n,step_k,x,g_sigma`, one row per arithmetic node.
std::string plan_to_csv(const ExprGraph& g, const PrecisionPlan& plan);
/// Reads a plan written by plan_to_csv for the same graph.
PrecisionPlan plan_from_csv(std::string_view text, const ExprGraph& g);

}  // namespace varprec
