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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "varprec/rational.hpp"

namespace varprec {

////////////////////////////////////////////////////////////
//
// extended block floating point (eBFP)
//
// - a number is cut into F-bit blocks; the exponent is the index of the
//   block holding the leading bit, stored biased in E-1 bits next to a
//   sign bit (the E-bit exponent block)
// - precision is the number of fraction blocks, range depends on E only
// - leading zeros inside the first fraction block are legal
//
////////////////////////////////////////////////////////////

struct EbfpParams {
  int F = 1;       // bits per fraction block
  int E = 10;      // bits of the exponent block, sign included
  int N_max = 128; // maximum number of fraction blocks

  /// Throws std::invalid_argument unless 1 <= F <= 32, 2 <= E <= 31, N_max >= 2.
  void validate() const;

  long bias() const { return (1L << (E - 2)) - 1; }
  /// Largest encodable exp_code; 0 is reserved for zero.
  long max_code() const { return (1L << (E - 1)) - 1; }
  long min_exponent() const { return 1 - bias(); }
  long max_exponent() const { return max_code() - bias(); }

  friend bool operator==(const EbfpParams&, const EbfpParams&) = default;
};

/// Experiment defaults: F=1, E=10.
inline constexpr EbfpParams kDefaultParams{1, 10, 128};

enum class EbfpFlag : std::uint8_t { normal, zero, overflow, underflow };

class EbfpNumber {
 public:
  EbfpNumber() = default;

  static EbfpNumber zero(int n_blocks);
  static EbfpNumber saturated(EbfpFlag flag, int sign);

  int sign() const { return sign_; }
  std::uint32_t exp_code() const { return exp_code_; }
  const std::vector<std::uint32_t>& blocks() const { return blocks_; }
  int n_blocks() const { return static_cast<int>(blocks_.size()); }
  EbfpFlag flag() const { return flag_; }

  bool is_zero() const { return flag_ == EbfpFlag::zero; }
  bool is_normal() const { return flag_ == EbfpFlag::normal; }
  bool is_saturated() const {
    return flag_ == EbfpFlag::overflow || flag_ == EbfpFlag::underflow;
  }

  /// Block index of the leading block (exp_code - bias).
  long exponent(const EbfpParams& p) const {
    return static_cast<long>(exp_code_) - p.bias();
  }
  /// Leading zero bits inside the first fraction block.
  int leading_zeros(const EbfpParams& p) const;

  /// Number of significant bits stored after the leading one.
  int fraction_bits(const EbfpParams& p) const;

  friend bool operator==(const EbfpNumber&, const EbfpNumber&) = default;

 private:
  friend class EbfpCodec;
  int sign_ = 1;
  std::uint32_t exp_code_ = 0;
  std::vector<std::uint32_t> blocks_;
  EbfpFlag flag_ = EbfpFlag::zero;
};

/// Thrown by decode() on saturated numbers.
class NotRepresentable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ArithOp : std::uint8_t { add, sub, mul, div, sqrt };

std::string_view to_string(ArithOp op);

/// Rounds |value| to `n_blocks` fraction blocks (RNE) and packs it.
/// Out-of-range exponents set a saturation flag instead of throwing.
EbfpNumber encode(const ExactRational& value, const EbfpParams& params,
                  int n_blocks);

/// Exact value of a normal or zero number. Throws NotRepresentable on saturation.
ExactRational decode(const EbfpNumber& n, const EbfpParams& params);

/// Rounds to x fraction bits (x+1 significant bits) and stores the result in
/// the fewest blocks that hold those bits; with F=1 that is x+1 blocks.
/// Throws std::invalid_argument if x < 1 or the blocks exceed N_max.
EbfpNumber round_to_precision(const ExactRational& value, int x,
                              const EbfpParams& params);

/// Guard bits used by div/sqrt before the final rounding: 2F+2.
inline int guard_bits(const EbfpParams& p) { return 2 * p.F + 2; }

/// Exact-then-round arithmetic at x_target fraction bits.
///
/// add/sub/mul form the exact result before rounding. div/sqrt develop
/// x_target+1+G bits plus a sticky bit, so they round correctly as well.
/// Saturated operands give a saturated result. Throws std::domain_error for
/// division by zero and for the square root of a negative number.
EbfpNumber arith(ArithOp op, const EbfpNumber& a, const EbfpNumber* b,
                 int x_target, const EbfpParams& params);

inline EbfpNumber arith(ArithOp op, const EbfpNumber& a, const EbfpNumber& b,
                        int x_target, const EbfpParams& params) {
  return arith(op, a, &b, x_target, params);
}

/// Host double nearest below |value| (truncating); reporting only.
double to_double(const EbfpNumber& n, const EbfpParams& params);

struct SpecRow {
  int total_bits;
  int exponent_bits;  // sign excluded
  int fraction_bits;
  double log10_max;
  double worst_rel_error;
};

/// Format figures for a number built from `total_blocks` blocks, the first
/// of which is the exponent block (the "eBFP N3" naming).
SpecRow spec_table(const EbfpParams& params, int total_blocks);

/// `sign|exp_code|b0.b1...` with zero-padded hexadecimal blocks; saturated
/// numbers print `ovf` or `unf` in the exponent slot and no blocks.
std::string to_text(const EbfpNumber& n, const EbfpParams& params);
/// Inverse of to_text. Throws std::invalid_argument on malformed input.
EbfpNumber from_text(std::string_view text, const EbfpParams& params);

}  // namespace varprec
