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


#include "varprec/expr_graph.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

namespace varprec {

std::string_view to_string(OpKind op) {
  switch (op) {
    case OpKind::input: return "input";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::sqrt: return "sqrt";
  }
  return "?";
}

OpKind op_kind_from_string(std::string_view name) {
  for (OpKind op : kAllOpKinds) {
    if (to_string(op) == name) return op;
  }
  throw std::invalid_argument("unknown op kind '" + std::string(name) + "'");
}

int arity(OpKind op) {
  switch (op) {
    case OpKind::input: return 0;
    case OpKind::sqrt: return 1;
    default: return 2;
  }
}

ArithOp to_arith(OpKind op) {
  switch (op) {
    case OpKind::add: return ArithOp::add;
    case OpKind::sub: return ArithOp::sub;
    case OpKind::mul: return ArithOp::mul;
    case OpKind::div: return ArithOp::div;
    case OpKind::sqrt: return ArithOp::sqrt;
    case OpKind::input: break;
  }
  throw std::invalid_argument("input nodes have no arithmetic");
}

OpKind from_arith(ArithOp op) {
  switch (op) {
    case ArithOp::add: return OpKind::add;
    case ArithOp::sub: return OpKind::sub;
    case ArithOp::mul: return OpKind::mul;
    case ArithOp::div: return OpKind::div;
    case ArithOp::sqrt: return OpKind::sqrt;
  }
  return OpKind::input;
}

std::string_view to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::fixed: return "fixed";
    case PlanKind::offline: return "offline";
    case PlanKind::online: return "online";
    case PlanKind::random_blockwise: return "random-blockwise";
  }
  return "?";
}

int ExprGraph::record(OpKind op, std::initializer_list<int> operands, int part) {
  return record(op, std::vector<int>(operands), part);
}

int ExprGraph::record(OpKind op, const std::vector<int>& operands, int part) {
  if (static_cast<int>(operands.size()) != arity(op)) {
    throw std::invalid_argument("record: " + std::string(to_string(op)) + " expects " +
                                std::to_string(arity(op)) + " operands");
  }
  int n = 0;
  for (int id : operands) {
    if (id < 0 || id >= size()) {
      throw std::invalid_argument("record: unknown operand id " + std::to_string(id));
    }
    n = std::max(n, nodes_[static_cast<std::size_t>(id)].step.n + 1);
  }
  if (static_cast<int>(level_width_.size()) <= n) level_width_.resize(static_cast<std::size_t>(n) + 1, 0);
  ExprNode node;
  node.id = size();
  node.op = op;
  node.operands = operands;
  node.step = {n, ++level_width_[static_cast<std::size_t>(n)]};
  node.part = part;
  nodes_.push_back(std::move(node));
  output_flag_.push_back(0);
  if (op == OpKind::input) inputs_.push_back(nodes_.back().id);
  return nodes_.back().id;
}

void ExprGraph::mark_output(int id) {
  if (id < 0 || id >= size()) throw std::invalid_argument("mark_output: unknown id");
  if (output_flag_[static_cast<std::size_t>(id)]) return;
  output_flag_[static_cast<std::size_t>(id)] = 1;
  outputs_.push_back(id);
}

bool ExprGraph::is_output(int id) const {
  return id >= 0 && id < size() && output_flag_[static_cast<std::size_t>(id)] != 0;
}

std::vector<std::vector<int>> ExprGraph::consumers() const {
  std::vector<std::vector<int>> out(nodes_.size());
  for (const ExprNode& n : nodes_) {
    for (int op : n.operands) {
      auto& list = out[static_cast<std::size_t>(op)];
      if (list.empty() || list.back() != n.id) list.push_back(n.id);
    }
  }
  return out;
}

void ExprGraph::validate() const {
  if (outputs_.empty()) throw GraphError("graph has no outputs", -1);
  // operands precede their consumers by construction; check reachability
  std::vector<char> reach(nodes_.size(), 0);
  for (const ExprNode& n : nodes_) {
    if (n.op == OpKind::input) {
      reach[static_cast<std::size_t>(n.id)] = 1;
      continue;
    }
    for (int op : n.operands) reach[static_cast<std::size_t>(n.id)] |= reach[static_cast<std::size_t>(op)];
    if (!reach[static_cast<std::size_t>(n.id)]) throw GraphError("node not reachable from inputs", n.id);
  }
}

int TopoStats::arithmetic_ops() const {
  int total = 0;
  for (OpKind op : kAllOpKinds) {
    if (op != OpKind::input) total += count(op);
  }
  return total;
}

TopoStats topo_stats(const ExprGraph& g) {
  TopoStats s;
  s.depth = std::max(0, g.depth());
  s.widths.assign(static_cast<std::size_t>(s.depth) + 1, 0);
  for (const ExprNode& n : g.nodes()) {
    ++s.counts[static_cast<std::size_t>(n.op)];
    ++s.widths[static_cast<std::size_t>(n.step.n)];
  }
  return s;
}

void store_input(const ExprGraph& g, std::size_t j, const ExactRational& value, int x_in,
                 ExecutionResult& state, const ExecOptions& opt) {
  const int id = g.inputs().at(j);
  auto& v = state.values[static_cast<std::size_t>(id)];
  v = round_to_precision(value, x_in, opt.params);
  if (v.is_saturated()) throw GraphError("input saturates the eBFP range", id);
  if (opt.propagate_errors) {
    state.err[static_cast<std::size_t>(id)] = {0.0, input_error_variance(x_in, opt.model)};
  }
}

void execute_node(const ExprGraph& g, int id, int x, ExecutionResult& state,
                  const ExecOptions& opt) {
  const ExprNode& n = g.node(id);
  const ArithOp op = to_arith(n.op);
  const EbfpNumber& a = state.values[static_cast<std::size_t>(n.operands[0])];
  const EbfpNumber* b =
      n.operands.size() > 1 ? &state.values[static_cast<std::size_t>(n.operands[1])] : nullptr;
  EbfpNumber r;
  try {
    r = arith(op, a, b, x, opt.params);
  } catch (const std::domain_error& e) {
    throw GraphError(e.what(), id);
  }
  if (r.is_saturated()) throw GraphError("result saturates the eBFP range", id);
  state.values[static_cast<std::size_t>(id)] = std::move(r);

  if (!opt.propagate_errors) return;
  const auto& ea = state.err[static_cast<std::size_t>(n.operands[0])];
  const double sa2 = ea.variance;
  const double sb2 = b ? state.err[static_cast<std::size_t>(n.operands[1])].variance : 0.0;
  const double av = to_double(a, opt.params);
  const double bv = b ? to_double(*b, opt.params) : 0.0;
  double sc2 = 0.0;
  try {
    sc2 = propagate_full_precision(op, av, bv, sa2, sb2);
  } catch (const SingularityError& e) {
    throw GraphError(e.what(), id);
  }
  state.err[static_cast<std::size_t>(id)] = {0.0, rounding_variance(sc2, x, opt.model)};
}

ExecutionResult execute(const ExprGraph& g, const PrecisionPlan& plan,
                        const std::vector<ExactRational>& input_values,
                        const std::vector<int>& input_precision, const ExecOptions& opt) {
  if (input_values.size() != g.inputs().size()) {
    throw std::invalid_argument("execute: expected " + std::to_string(g.inputs().size()) +
                                " input values");
  }
  if (input_precision.size() != 1 && input_precision.size() != g.inputs().size()) {
    throw std::invalid_argument("execute: input precision count mismatch");
  }
  if (plan.x.size() != static_cast<std::size_t>(g.size())) {
    throw std::invalid_argument("execute: plan does not cover the graph");
  }
  ExecutionResult state;
  state.values.resize(static_cast<std::size_t>(g.size()));
  state.err.resize(static_cast<std::size_t>(g.size()));
  for (std::size_t j = 0; j < g.inputs().size(); ++j) {
    const int x_in = input_precision.size() == 1 ? input_precision[0] : input_precision[j];
    store_input(g, j, input_values[j], x_in, state, opt);
  }
  for (const ExprNode& n : g.nodes()) {
    if (n.op == OpKind::input) continue;
    execute_node(g, n.id, plan.x[static_cast<std::size_t>(n.id)], state, opt);
  }
  return state;
}

std::string to_jsonl(const ExprGraph& g, const PrecisionPlan* plan) {
  std::ostringstream out;
  for (const ExprNode& n : g.nodes()) {
    nlohmann::json j;
    j["id"] = n.id;
    j["op"] = std::string(to_string(n.op));
    j["operands"] = n.operands;
    j["step"] = {n.step.n, n.step.k};
    j["part"] = n.part;
    j["output"] = g.is_output(n.id);
    if (plan && n.op != OpKind::input) {
      j["precision"] = plan->x.at(static_cast<std::size_t>(n.id));
    } else {
      j["precision"] = nullptr;
    }
    out << j.dump() << '\n';
  }
  return out.str();
}

GraphDump from_jsonl(std::string_view text) {
  GraphDump d;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<int> xs;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const OpKind op = op_kind_from_string(j.at("op").get<std::string>());
      const int id = d.graph.record(op, j.at("operands").get<std::vector<int>>(),
                                    j.value("part", 0));
      if (id != j.at("id").get<int>()) throw std::invalid_argument("ids must be dense and ordered");
      const auto step = j.at("step").get<std::vector<int>>();
      const Step s = d.graph.node(id).step;
      if (step.size() != 2 || step[0] != s.n || step[1] != s.k) {
        throw std::invalid_argument("step does not match the operands");
      }
      if (j.value("output", false)) d.graph.mark_output(id);
      if (!j.at("precision").is_null()) {
        d.has_precision = true;
        xs.push_back(j.at("precision").get<int>());
      } else {
        xs.push_back(0);
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("graph dump line " + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("graph dump line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  d.plan.x = std::move(xs);
  d.plan.g_sigma.assign(d.plan.x.size(), 0.0);
  return d;
}

}  // namespace varprec
