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
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "varprec/ebfp.hpp"
#include "varprec/error_model.hpp"

namespace varprec {

enum class OpKind : std::uint8_t { input, add, sub, mul, div, sqrt };

inline constexpr std::array<OpKind, 6> kAllOpKinds{OpKind::input, OpKind::add, OpKind::sub,
                                                   OpKind::mul,   OpKind::div, OpKind::sqrt};

std::string_view to_string(OpKind op);
/// Throws std::invalid_argument for unknown names.
OpKind op_kind_from_string(std::string_view name);
int arity(OpKind op);
/// Throws std::invalid_argument for OpKind::input.
ArithOp to_arith(OpKind op);
OpKind from_arith(ArithOp op);

/// Position in the leveled graph: n is the longest path from the inputs,
/// k the insertion order within level n (starting at 1).
struct Step {
  int n = 0;
  int k = 0;
  friend bool operator==(const Step&, const Step&) = default;
};

struct ExprNode {
  int id = 0;
  OpKind op = OpKind::input;
  std::vector<int> operands;
  Step step;
  int part = 0;  // builder-defined label, 0 for untagged
};

/// Error tied to one node; id is -1 when no node applies.
class GraphError : public std::runtime_error {
 public:
  GraphError(const std::string& what, int node_id)
      : std::runtime_error(what + " (node " + std::to_string(node_id) + ")"), node_id_(node_id) {}
  int node_id() const { return node_id_; }

 private:
  int node_id_;
};

class ExprGraph {
 public:
  /// Appends a node. Throws std::invalid_argument on unknown operand ids or
  /// arity mismatch.
  int record(OpKind op, std::initializer_list<int> operands, int part = 0);
  int record(OpKind op, const std::vector<int>& operands, int part = 0);
  int input(int part = 0) { return record(OpKind::input, {}, part); }
  void mark_output(int id);

  const std::vector<ExprNode>& nodes() const { return nodes_; }
  const ExprNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<int>& inputs() const { return inputs_; }
  const std::vector<int>& outputs() const { return outputs_; }
  bool is_output(int id) const;
  int depth() const { return static_cast<int>(level_width_.size()) - 1; }

  /// consumers()[id] lists the nodes that read node id.
  std::vector<std::vector<int>> consumers() const;

  /// Throws GraphError unless outputs exist and every arithmetic node
  /// depends on at least one input.
  void validate() const;

 private:
  std::vector<ExprNode> nodes_;
  std::vector<int> inputs_;
  std::vector<int> outputs_;
  std::vector<char> output_flag_;
  std::vector<int> level_width_;
};

struct TopoStats {
  std::array<int, 6> counts{};  // indexed by OpKind
  int depth = 0;
  std::vector<int> widths;      // nodes per level n = 0..depth
  int arithmetic_ops() const;
  int count(OpKind op) const { return counts[static_cast<std::size_t>(op)]; }
};

TopoStats topo_stats(const ExprGraph& g);

enum class PlanKind { fixed, offline, online, random_blockwise };

std::string_view to_string(PlanKind kind);

/// Fraction bits per node, indexed by node id; entries of input nodes are
/// unused. g_sigma holds the sensitivity coefficient when an optimizer set it.
struct PrecisionPlan {
  std::vector<int> x;
  std::vector<double> g_sigma;
  PlanKind kind = PlanKind::fixed;
};

struct ExecOptions {
  EbfpParams params = kDefaultParams;
  RoundingModel model;
  bool propagate_errors = true;
};

struct ExecutionResult {
  std::vector<EbfpNumber> values;
  std::vector<RelErrorStats> err;

  double value(int id, const EbfpParams& p = kDefaultParams) const {
    return to_double(values.at(static_cast<std::size_t>(id)), p);
  }
};

/// Stores each input at its storage precision, then runs every node at its
/// plan precision. `input_precision` has one entry per input or a single
/// entry shared by all. Throws GraphError on division by zero, square root of
/// a negative, saturation, or a singular add/sub error frame.
ExecutionResult execute(const ExprGraph& g, const PrecisionPlan& plan,
                        const std::vector<ExactRational>& input_values,
                        const std::vector<int>& input_precision, const ExecOptions& opt = {});

/// Executes one node whose operands are already in `state`.
void execute_node(const ExprGraph& g, int id, int x, ExecutionResult& state,
                  const ExecOptions& opt);

/// Stores input slot j (the j-th recorded input) into `state`.
void store_input(const ExprGraph& g, std::size_t j, const ExactRational& value, int x_in,
                 ExecutionResult& state, const ExecOptions& opt);

/// One JSON object per line: id, op, operands, step [n, k], part, precision
/// (null without a plan).
std::string to_jsonl(const ExprGraph& g, const PrecisionPlan* plan = nullptr);

struct GraphDump {
  ExprGraph graph;
  PrecisionPlan plan;
  bool has_precision = false;
};

/// Inverse of to_jsonl. Throws std::invalid_argument on malformed input.
GraphDump from_jsonl(std::string_view text);

}  // namespace varprec
