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


#include "varprec/vpc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace varprec {

void ComplexityModel::validate() const {
  for (OpKind op : kAllOpKinds) {
    if (op != OpKind::input && !(weight(op) > 0.0)) {
      throw std::invalid_argument("ComplexityModel: weight of " + std::string(to_string(op)) +
                                  " must be > 0");
    }
  }
}

double UtilityConfig::beta(std::size_t output_index) const {
  if (out_weights.empty()) return 1.0;
  return out_weights.at(output_index);
}

void UtilityConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("UtilityConfig: alpha must be > 0");
  if (!(eps > 1.0)) throw std::invalid_argument("UtilityConfig: eps must be > 1");
  if (x_min < 1 || x_max < x_min) throw std::invalid_argument("UtilityConfig: need 1 <= x_min <= x_max");
  if (!(w_var > 0.0)) throw std::invalid_argument("UtilityConfig: w_var must be > 0");
  if (e_b < 2) throw std::invalid_argument("UtilityConfig: e_b must be >= 2");
  bool any = out_weights.empty();
  for (double b : out_weights) {
    if (b < 0.0) throw std::invalid_argument("UtilityConfig: negative output weight");
    any = any || b > 0.0;
  }
  if (!any) throw std::invalid_argument("UtilityConfig: all output weights are zero");
}

double UtilityConfig::sigma_coefficient() const {
  return -2.0 * std::log(eps) / (eps * eps) * w_var;
}

XoptLut::XoptLut(const ComplexityModel& cm, const UtilityConfig& cfg)
    : cm_(cm), eps_(cfg.eps), x_min_(cfg.x_min), x_max_(cfg.x_max) {
  cm.validate();
  cfg.validate();
  log_eps2_ = 2.0 * std::log(eps_);
  scale_ = 2.0 * std::log(eps_) / (1.0 - 1.0 / (eps_ * eps_));
}

double XoptLut::threshold(OpKind op, int x) const {
  return cm_.weight(op) * scale_ * std::exp(log_eps2_ * x);
}

double XoptLut::stationary_rho(OpKind op, int x) const {
  return cm_.weight(op) * std::exp(log_eps2_ * x);
}

int XoptLut::lookup(OpKind op, double rho) const {
  if (!(rho > 0.0)) return x_min_;
  const double guess = std::ceil(std::log(rho / (cm_.weight(op) * scale_)) / log_eps2_);
  int x = static_cast<int>(std::clamp(guess, static_cast<double>(x_min_), static_cast<double>(x_max_)));
  while (x > x_min_ && rho <= threshold(op, x - 1)) --x;
  while (x < x_max_ && rho > threshold(op, x)) ++x;
  return x;
}

double XoptLut::reverse(OpKind op, int x) const {
  x = std::clamp(x, x_min_, x_max_);
  if (x == x_max_ && x_max_ > x_min_) return threshold(op, x - 1) * eps_;
  return threshold(op, x) / eps_;
}

FinalStep final_step_precision(const ExprGraph& g, const UtilityConfig& cfg,
                               const ComplexityModel& cm) {
  const XoptLut lut(cm, cfg);
  FinalStep fs;
  fs.g_o = cfg.alpha;
  for (std::size_t k = 0; k < g.outputs().size(); ++k) {
    const double gs = cfg.beta(k) * cfg.sigma_coefficient();
    fs.g_sigma.push_back(gs);
    fs.x.push_back(lut.lookup(g.node(g.outputs()[k]).op, -gs / fs.g_o));
  }
  return fs;
}

namespace {

std::vector<double> output_seed(const ExprGraph& g, const UtilityConfig& cfg) {
  std::vector<double> seed(static_cast<std::size_t>(g.size()), 0.0);
  for (std::size_t k = 0; k < g.outputs().size(); ++k) {
    seed[static_cast<std::size_t>(g.outputs()[k])] += cfg.beta(k) * cfg.sigma_coefficient();
  }
  return seed;
}

PrecisionPlan empty_plan(const ExprGraph& g, PlanKind kind) {
  PrecisionPlan p;
  p.x.assign(static_cast<std::size_t>(g.size()), 0);
  p.g_sigma.assign(static_cast<std::size_t>(g.size()), 0.0);
  p.kind = kind;
  return p;
}

}  // namespace

PrecisionPlan offline_vpc(const ExprGraph& g, const UtilityConfig& cfg, const ComplexityModel& cm) {
  const XoptLut lut(cm, cfg);
  g.validate();
  PrecisionPlan plan = empty_plan(g, PlanKind::offline);
  std::vector<double> gs = output_seed(g, cfg);
  for (int id = g.size() - 1; id >= 0; --id) {
    const ExprNode& n = g.node(id);
    if (n.op == OpKind::input) continue;
    const double f = speculation_factor(to_arith(n.op), Direction::backward, cfg.e_b);
    for (int o : n.operands) gs[static_cast<std::size_t>(o)] += gs[static_cast<std::size_t>(id)] * f;
    plan.x[static_cast<std::size_t>(id)] = lut.lookup(n.op, -gs[static_cast<std::size_t>(id)] / cfg.alpha);
  }
  plan.g_sigma = std::move(gs);
  return plan;
}

namespace {

struct PathInfo {
  int len = -1;  // -1: no output reachable
  int n_add = 0;
  int n_sub = 0;
  int n_sqrt = 0;
  int output = -1;
};

// longest path from each node to an output, with the drifting ops on it
std::vector<PathInfo> longest_paths(const ExprGraph& g) {
  std::vector<int> out_index(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t k = 0; k < g.outputs().size(); ++k) {
    out_index[static_cast<std::size_t>(g.outputs()[k])] = static_cast<int>(k);
  }
  const auto cons = g.consumers();
  std::vector<PathInfo> info(static_cast<std::size_t>(g.size()));
  for (int id = g.size() - 1; id >= 0; --id) {
    PathInfo& best = info[static_cast<std::size_t>(id)];
    if (out_index[static_cast<std::size_t>(id)] >= 0) {
      best.len = 0;
      best.output = out_index[static_cast<std::size_t>(id)];
    }
    for (int c : cons[static_cast<std::size_t>(id)]) {
      PathInfo cand = info[static_cast<std::size_t>(c)];
      if (cand.len < 0) continue;
      cand.len += 1;
      const OpKind op = g.node(c).op;
      cand.n_add += op == OpKind::add;
      cand.n_sub += op == OpKind::sub;
      cand.n_sqrt += op == OpKind::sqrt;
      if (cand.len > best.len) best = cand;
    }
  }
  return info;
}

int binary_exponent(double v) {
  int e = 0;
  std::frexp(v, &e);
  return e;
}

// forward factor on the sensitivity from operand `self` to its consumer:
// a^2/(a+-b)^2 for add/sub, from exponents alone when they differ
double forward_factor(OpKind op, double self, double other, double eps) {
  switch (op) {
    case OpKind::mul:
    case OpKind::div:
      return 1.0;
    case OpKind::sqrt:
      return 4.0;
    case OpKind::add:
    case OpKind::sub: {
      if (other == 0.0) return 1.0;
      const int ea = binary_exponent(self);
      const int eb = binary_exponent(other);
      if (ea != eb) return std::pow(eps, 2.0 * (ea - std::max(ea, eb)));
      const double c = op == OpKind::add ? self + other : self - other;
      if (c == 0.0) return std::numeric_limits<double>::infinity();
      return (self * self) / (c * c);
    }
    case OpKind::input:
      break;
  }
  return 1.0;
}

}  // namespace

OnlineResult online_vpc(const ExprGraph& g, const UtilityConfig& cfg, const ComplexityModel& cm,
                        const std::vector<ExactRational>& input_values,
                        const std::vector<int>& input_precision, const ExecOptions& opt) {
  const XoptLut lut(cm, cfg);
  g.validate();
  if (input_values.size() != g.inputs().size()) {
    throw std::invalid_argument("online_vpc: expected " + std::to_string(g.inputs().size()) +
                                " input values");
  }
  if (input_precision.size() != 1 && input_precision.size() != g.inputs().size()) {
    throw std::invalid_argument("online_vpc: input precision count mismatch");
  }

  const FinalStep fs = final_step_precision(g, cfg, cm);
  const std::vector<PathInfo> paths = longest_paths(g);
  const double opb_add = ops_per_bit(ArithOp::add, cfg.e_b, cfg.eps);
  const double opb_sub = ops_per_bit(ArithOp::sub, cfg.e_b, cfg.eps);

  OnlineResult res;
  res.plan = empty_plan(g, PlanKind::online);
  ExecutionResult& st = res.exec;
  st.values.resize(static_cast<std::size_t>(g.size()));
  st.err.resize(static_cast<std::size_t>(g.size()));
  for (std::size_t j = 0; j < g.inputs().size(); ++j) {
    const int x_in = input_precision.size() == 1 ? input_precision[0] : input_precision[j];
    store_input(g, j, input_values[j], x_in, st, opt);
  }

  std::vector<double> rho(static_cast<std::size_t>(g.size()), 0.0);
  std::vector<double> val(static_cast<std::size_t>(g.size()), 0.0);
  for (int id : g.inputs()) val[static_cast<std::size_t>(id)] = st.value(id, opt.params);

  for (const ExprNode& n : g.nodes()) {
    if (n.op == OpKind::input) continue;
    const auto id = static_cast<std::size_t>(n.id);
    double props[2] = {0.0, 0.0};
    double weights[2] = {0.0, 0.0};
    int count = 0;
    bool exact_zero = false;
    for (std::size_t i = 0; i < n.operands.size(); ++i) {
      const int o = n.operands[i];
      if (g.node(o).op == OpKind::input) continue;
      const double self = val[static_cast<std::size_t>(o)];
      if (self == 0.0) continue;  // contributes no relative error downstream
      const double other = n.operands.size() > 1 ? val[static_cast<std::size_t>(n.operands[1 - i])] : 0.0;
      const double f = forward_factor(n.op, self, other, cfg.eps);
      if (std::isinf(f)) exact_zero = true;  // a - b = 0 is exact at any precision
      props[count] = rho[static_cast<std::size_t>(o)] * f;
      weights[count] = std::fabs(self);
      ++count;
    }

    double r = 0.0;
    if (exact_zero) {
      r = 0.0;
    } else if (count == 0) {
      const PathInfo& p = paths[id];
      if (p.len >= 0) {
        const double x_d = p.n_sub / opb_sub - p.n_add / opb_add - p.n_sqrt;
        const double r_final = -fs.g_sigma[static_cast<std::size_t>(p.output)] / fs.g_o;
        r = r_final * std::pow(cfg.eps, 2.0 * x_d);
      }
    } else if (count == 1) {
      r = props[0];
    } else if (n.op == OpKind::add || n.op == OpKind::sub) {
      r = (weights[0] * props[0] + weights[1] * props[1]) / (weights[0] + weights[1]);
    } else {
      r = 0.5 * (props[0] + props[1]);
    }
    rho[id] = r;
    const int x = lut.lookup(n.op, r);
    res.plan.x[id] = x;
    res.plan.g_sigma[id] = -r * cfg.alpha;
    execute_node(g, n.id, x, st, opt);
    val[id] = st.value(n.id, opt.params);
  }
  return res;
}

PrecisionPlan fixed_plan(const ExprGraph& g, int x) {
  if (x < 1) throw std::invalid_argument("fixed_plan: x must be >= 1");
  PrecisionPlan p = empty_plan(g, PlanKind::fixed);
  for (const ExprNode& n : g.nodes()) {
    if (n.op != OpKind::input) p.x[static_cast<std::size_t>(n.id)] = x;
  }
  return p;
}

PrecisionPlan random_blockwise_plan(const ExprGraph& g, std::mt19937_64& rng, int lo, int hi) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("random_blockwise_plan: need 1 <= lo <= hi");
  std::map<int, int> part_x;
  for (const ExprNode& n : g.nodes()) {
    if (n.op == OpKind::input) continue;
    if (n.part == 0) throw GraphError("arithmetic node has no part label", n.id);
    part_x.emplace(n.part, 0);
  }
  std::uniform_int_distribution<int> draw(lo, hi);
  for (auto& [part, x] : part_x) x = draw(rng);
  PrecisionPlan p = empty_plan(g, PlanKind::random_blockwise);
  for (const ExprNode& n : g.nodes()) {
    if (n.op != OpKind::input) p.x[static_cast<std::size_t>(n.id)] = part_x.at(n.part);
  }
  return p;
}

PlanMetrics plan_metrics(const ExprGraph& g, const PrecisionPlan& plan, const ComplexityModel& cm) {
  double wsum = 0.0;
  PlanMetrics m;
  for (const ExprNode& n : g.nodes()) {
    if (n.op == OpKind::input) continue;
    const double w = cm.weight(n.op);
    wsum += w;
    m.total_complexity += w * plan.x.at(static_cast<std::size_t>(n.id));
  }
  m.avg_bits = wsum > 0.0 ? m.total_complexity / wsum : 0.0;
  return m;
}

std::string plan_to_csv(const ExprGraph& g, const PrecisionPlan& plan) {
  std::ostringstream out;
  out << "node_id,op,step_n,step_k,x,g_sigma\n";
  char buf[64];
  for (const ExprNode& n : g.nodes()) {
    if (n.op == OpKind::input) continue;
    const auto id = static_cast<std::size_t>(n.id);
    const double gs = id < plan.g_sigma.size() ? plan.g_sigma[id] : 0.0;
    std::snprintf(buf, sizeof buf, "%.17g", gs);
    out << n.id << ',' << to_string(n.op) << ',' << n.step.n << ',' << n.step.k << ','
        << plan.x.at(id) << ',' << buf << '\n';
  }
  return out.str();
}

PrecisionPlan plan_from_csv(std::string_view text, const ExprGraph& g) {
  PrecisionPlan p = empty_plan(g, PlanKind::fixed);
  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    auto bad = [&](const std::string& why) {
      return std::invalid_argument("plan csv line " + std::to_string(line_no) + ": " + why);
    };
    if (f.size() != 6) throw bad("expected 6 fields");
    int id = 0;
    try {
      id = std::stoi(f[0]);
      if (id < 0 || id >= g.size()) throw bad("unknown node id");
      const ExprNode& n = g.node(id);
      if (to_string(n.op) != f[1]) throw bad("op does not match the graph");
      if (std::stoi(f[2]) != n.step.n || std::stoi(f[3]) != n.step.k) throw bad("step mismatch");
      p.x[static_cast<std::size_t>(id)] = std::stoi(f[4]);
      p.g_sigma[static_cast<std::size_t>(id)] = std::stod(f[5]);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw bad(e.what());
    }
    seen[static_cast<std::size_t>(id)] = 1;
  }
  for (const ExprNode& n : g.nodes()) {
    if (n.op != OpKind::input && !seen[static_cast<std::size_t>(n.id)]) {
      throw std::invalid_argument("plan csv does not cover node " + std::to_string(n.id));
    }
  }
  return p;
}

}  // namespace varprec
