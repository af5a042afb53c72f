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

#include "varprec/ebfp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace varprec {

namespace {

// sign * mag * 2^exp, sign == 0 for zero
struct Dyadic {
  int sign = 0;
  mpz_class mag;
  long exp = 0;
};

long bitlen(const mpz_class& m) {
  return static_cast<long>(mpz_sizeinbase(m.get_mpz_t(), 2));
}

// exponent of the leading bit plus one: |d| in [2^(top-1), 2^top)
long top(const Dyadic& d) { return d.exp + bitlen(d.mag); }

long ceil_div(long a, long b) {
  // b > 0
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

void round_in_place(Dyadic& d, long sig) {
  if (d.sign == 0) return;
  const long len = bitlen(d.mag);
  if (len <= sig) return;
  const auto s = static_cast<mp_bitcnt_t>(len - sig);
  const bool half = mpz_tstbit(d.mag.get_mpz_t(), s - 1) != 0;
  const bool sticky = half && mpz_scan1(d.mag.get_mpz_t(), 0) < s - 1;
  mpz_fdiv_q_2exp(d.mag.get_mpz_t(), d.mag.get_mpz_t(), s);
  d.exp += static_cast<long>(s);
  if (half && (sticky || mpz_odd_p(d.mag.get_mpz_t()))) {
    d.mag += 1;
    if (bitlen(d.mag) > sig) {
      d.mag >>= 1;
      d.exp += 1;
    }
  }
}

Dyadic from_rational_rounded(const ExactRational& v, long sig) {
  Dyadic d;
  d.sign = v.sign();
  if (d.sign == 0) return d;
  const mpz_class num = ::abs(v.numerator());
  const mpz_class den = v.denominator();
  if (v.is_dyadic()) {
    d.mag = num;
    d.exp = -static_cast<long>(mpz_scan1(den.get_mpz_t(), 0));
    round_in_place(d, sig);
    return d;
  }
  const long e_sci = v.floor_log2_abs() + 1;
  const long k = sig - e_sci;
  mpz_class n = num;
  mpz_class m = den;
  if (k >= 0) {
    n <<= static_cast<mp_bitcnt_t>(k);
  } else {
    m <<= static_cast<mp_bitcnt_t>(-k);
  }
  mpz_class q;
  mpz_class r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t());
  const int c = cmp(mpz_class(r << 1), m);
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
  d.mag = q;
  d.exp = -k;
  if (bitlen(d.mag) > sig) {
    d.mag >>= 1;
    d.exp += 1;
  }
  return d;
}

}  // namespace

class EbfpCodec {
 public:
  static EbfpNumber pack(const Dyadic& d, long n_blocks, const EbfpParams& p) {
    if (d.sign == 0) return EbfpNumber::zero(static_cast<int>(n_blocks));
    const long e_sci = top(d);
    const long e = ceil_div(e_sci, p.F);
    if (e > p.max_exponent()) return EbfpNumber::saturated(EbfpFlag::overflow, d.sign);
    if (e < p.min_exponent()) return EbfpNumber::saturated(EbfpFlag::underflow, d.sign);
    const long shift = d.exp - p.F * (e - n_blocks);
    mpz_class b = d.mag;
    b <<= static_cast<mp_bitcnt_t>(shift);

    EbfpNumber out;
    out.sign_ = d.sign;
    out.exp_code_ = static_cast<std::uint32_t>(e + p.bias());
    out.flag_ = EbfpFlag::normal;
    out.blocks_.assign(static_cast<std::size_t>(n_blocks), 0);
    mp_bitcnt_t bit = 0;
    for (long i = n_blocks - 1; i >= 0; --i) {
      std::uint32_t blk = 0;
      for (int j = 0; j < p.F; ++j, ++bit) {
        if (mpz_tstbit(b.get_mpz_t(), bit)) blk |= 1u << j;
      }
      out.blocks_[static_cast<std::size_t>(i)] = blk;
    }
    return out;
  }

  static Dyadic unpack(const EbfpNumber& n, const EbfpParams& p) {
    Dyadic d;
    if (n.is_zero()) return d;
    if (n.is_saturated()) throw NotRepresentable("eBFP value is saturated");
    // F <= 32, so blocks can be accumulated into 64-bit words
    std::vector<std::uint64_t> words;
    std::uint64_t acc = 0;
    int filled = 0;
    for (auto it = n.blocks_.rbegin(); it != n.blocks_.rend(); ++it) {
      const std::uint64_t blk = *it;
      acc |= blk << filled;
      filled += p.F;
      if (filled >= 64) {
        words.push_back(acc);
        filled -= 64;
        acc = filled > 0 ? blk >> (p.F - filled) : 0;
      }
    }
    if (filled > 0) words.push_back(acc);
    mpz_import(d.mag.get_mpz_t(), words.size(), -1, sizeof(std::uint64_t), 0, 0,
               words.data());
    d.sign = n.sign_;
    d.exp = p.F * (n.exponent(p) - n.n_blocks());
    return d;
  }

  static EbfpNumber make(int sign, std::uint32_t code, std::vector<std::uint32_t> blocks,
                         EbfpFlag flag) {
    EbfpNumber out;
    out.sign_ = sign;
    out.exp_code_ = code;
    out.blocks_ = std::move(blocks);
    out.flag_ = flag;
    return out;
  }
};

void EbfpParams::validate() const {
  if (F < 1 || F > 32) throw std::invalid_argument("EbfpParams: F must be in [1, 32]");
  if (E < 2 || E > 31) throw std::invalid_argument("EbfpParams: E must be in [2, 31]");
  if (N_max < 2) throw std::invalid_argument("EbfpParams: N_max must be >= 2");
}

EbfpNumber EbfpNumber::zero(int n_blocks) {
  return EbfpCodec::make(1, 0, std::vector<std::uint32_t>(static_cast<std::size_t>(n_blocks), 0),
                         EbfpFlag::zero);
}

EbfpNumber EbfpNumber::saturated(EbfpFlag flag, int sign) {
  return EbfpCodec::make(sign < 0 ? -1 : 1, 0, {}, flag);
}

int EbfpNumber::leading_zeros(const EbfpParams& p) const {
  if (!is_normal()) return 0;
  const std::uint32_t b0 = blocks_.front();
  int len = 0;
  while (len < 32 && (b0 >> len) != 0) ++len;
  return p.F - len;
}

int EbfpNumber::fraction_bits(const EbfpParams& p) const {
  if (!is_normal()) return 0;
  return n_blocks() * p.F - leading_zeros(p) - 1;
}

std::string_view to_string(ArithOp op) {
  switch (op) {
    case ArithOp::add: return "add";
    case ArithOp::sub: return "sub";
    case ArithOp::mul: return "mul";
    case ArithOp::div: return "div";
    case ArithOp::sqrt: return "sqrt";
  }
  return "?";
}

EbfpNumber encode(const ExactRational& value, const EbfpParams& params, int n_blocks) {
  params.validate();
  if (n_blocks < 1 || n_blocks > params.N_max) {
    throw std::invalid_argument("encode: n_blocks out of [1, N_max]");
  }
  if (value.is_zero()) return EbfpNumber::zero(n_blocks);
  const long e_sci = value.floor_log2_abs() + 1;
  const long e = ceil_div(e_sci, params.F);
  const long z = e * params.F - e_sci;
  const long sig = static_cast<long>(n_blocks) * params.F - z;
  // a carry out of rounding gives a power of two, which packs exactly
  return EbfpCodec::pack(from_rational_rounded(value, sig), n_blocks, params);
}

ExactRational decode(const EbfpNumber& n, const EbfpParams& params) {
  const Dyadic d = EbfpCodec::unpack(n, params);
  if (d.sign == 0) return ExactRational(0);
  return ExactRational::from_scaled(d.sign, d.mag, d.exp);
}

namespace {

long blocks_for(long sig, long z, const EbfpParams& p) { return ceil_div(sig + z, p.F); }

EbfpNumber store_rounded(Dyadic d, int x, const EbfpParams& p) {
  const long sig = x + 1L;
  if (d.sign == 0) return EbfpNumber::zero(static_cast<int>(blocks_for(sig, 0, p)));
  round_in_place(d, sig);
  const long e_sci = top(d);
  const long z = ceil_div(e_sci, p.F) * p.F - e_sci;
  const long n = blocks_for(sig, z, p);
  if (n > p.N_max) throw std::invalid_argument("precision exceeds N_max blocks");
  return EbfpCodec::pack(d, n, p);
}

void check_precision(int x, const EbfpParams& p) {
  if (x < 1) throw std::invalid_argument("precision x must be >= 1");
  if (blocks_for(x + 1L, p.F - 1L, p) > p.N_max) {
    throw std::invalid_argument("precision exceeds N_max blocks");
  }
}

Dyadic add_signed(const Dyadic& a, const Dyadic& b, int b_sign) {
  if (b.sign == 0) return a;
  Dyadic out;
  if (a.sign == 0) {
    out = b;
    out.sign = b.sign * b_sign;
    return out;
  }
  const long e = std::min(a.exp, b.exp);
  mpz_class sa = a.mag;
  mpz_class sb = b.mag;
  sa <<= static_cast<mp_bitcnt_t>(a.exp - e);
  sb <<= static_cast<mp_bitcnt_t>(b.exp - e);
  if (a.sign < 0) sa = -sa;
  if (b.sign * b_sign < 0) sb = -sb;
  mpz_class s = sa + sb;
  out.sign = sgn(s);
  out.mag = ::abs(s);
  out.exp = e;
  return out;
}

}  // namespace

EbfpNumber round_to_precision(const ExactRational& value, int x, const EbfpParams& params) {
  params.validate();
  check_precision(x, params);
  return store_rounded(from_rational_rounded(value, x + 1L), x, params);
}

EbfpNumber arith(ArithOp op, const EbfpNumber& a, const EbfpNumber* b, int x_target,
                 const EbfpParams& params) {
  params.validate();
  check_precision(x_target, params);
  const bool binary = op != ArithOp::sqrt;
  if (binary && b == nullptr) throw std::invalid_argument("arith: missing second operand");

  if (a.is_saturated() || (binary && b->is_saturated())) {
    const bool ovf = a.flag() == EbfpFlag::overflow ||
                     (binary && b->flag() == EbfpFlag::overflow);
    const int s = binary ? a.sign() * b->sign() : a.sign();
    return EbfpNumber::saturated(ovf ? EbfpFlag::overflow : EbfpFlag::underflow, s);
  }

  const Dyadic da = EbfpCodec::unpack(a, params);
  Dyadic r;
  switch (op) {
    case ArithOp::add:
      r = add_signed(da, EbfpCodec::unpack(*b, params), 1);
      break;
    case ArithOp::sub:
      r = add_signed(da, EbfpCodec::unpack(*b, params), -1);
      break;
    case ArithOp::mul: {
      const Dyadic db = EbfpCodec::unpack(*b, params);
      r.sign = da.sign * db.sign;
      if (r.sign != 0) {
        r.mag = da.mag * db.mag;
        r.exp = da.exp + db.exp;
      }
      break;
    }
    case ArithOp::div: {
      const Dyadic db = EbfpCodec::unpack(*b, params);
      if (db.sign == 0) throw std::domain_error("arith: division by zero");
      if (da.sign == 0) break;
      const long want = x_target + 1L + guard_bits(params);
      const long k = std::max(0L, want + bitlen(db.mag) - bitlen(da.mag) + 1);
      mpz_class n = da.mag;
      n <<= static_cast<mp_bitcnt_t>(k);
      mpz_class q;
      mpz_class rem;
      mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t(), db.mag.get_mpz_t());
      long e = da.exp - db.exp - k;
      if (rem != 0) {
        q <<= 1;
        q += 1;
        e -= 1;
      }
      r.sign = da.sign * db.sign;
      r.mag = q;
      r.exp = e;
      break;
    }
    case ArithOp::sqrt: {
      if (da.sign < 0) throw std::domain_error("arith: sqrt of negative value");
      if (da.sign == 0) break;
      mpz_class m = da.mag;
      long e = da.exp;
      if (e % 2 != 0) {
        m <<= 1;
        e -= 1;
      }
      const long want = x_target + 1L + guard_bits(params);
      const long k = std::max(0L, want + 1 - bitlen(m) / 2);
      m <<= static_cast<mp_bitcnt_t>(2 * k);
      mpz_class root;
      mpz_class rem;
      mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), m.get_mpz_t());
      e = e / 2 - k;
      if (rem != 0) {
        root <<= 1;
        root += 1;
        e -= 1;
      }
      r.sign = 1;
      r.mag = root;
      r.exp = e;
      break;
    }
  }
  return store_rounded(std::move(r), x_target, params);
}

double to_double(const EbfpNumber& n, const EbfpParams& params) {
  if (n.flag() == EbfpFlag::overflow) return n.sign() * HUGE_VAL;
  if (n.flag() == EbfpFlag::underflow) return n.sign() * 0.0;
  const Dyadic d = EbfpCodec::unpack(n, params);
  if (d.sign == 0) return 0.0;
  long e2 = 0;
  const double m = mpz_get_d_2exp(&e2, d.mag.get_mpz_t());
  return d.sign * std::ldexp(m, static_cast<int>(e2 + d.exp));
}

SpecRow spec_table(const EbfpParams& params, int total_blocks) {
  params.validate();
  if (total_blocks < 2) throw std::invalid_argument("spec_table: need >= 2 blocks");
  const int frac = (total_blocks - 1) * params.F;
  SpecRow row{};
  row.total_bits = params.E + frac;
  row.exponent_bits = params.E - 1;
  row.fraction_bits = frac;
  row.log10_max = std::log10(2.0) * params.F * static_cast<double>(params.max_exponent());
  row.worst_rel_error = std::ldexp(1.0, -(frac - (params.F - 1) + 1));
  return row;
}

std::string to_text(const EbfpNumber& n, const EbfpParams& params) {
  std::string out(1, n.sign() < 0 ? '-' : '+');
  out.push_back('|');
  if (n.flag() == EbfpFlag::overflow) return out + "ovf|";
  if (n.flag() == EbfpFlag::underflow) return out + "unf|";
  out += std::to_string(n.exp_code());
  out.push_back('|');
  const int width = (params.F + 3) / 4;
  char buf[16];
  for (std::size_t i = 0; i < n.blocks().size(); ++i) {
    if (i) out.push_back('.');
    std::snprintf(buf, sizeof buf, "%0*x", width, n.blocks()[i]);
    out += buf;
  }
  return out;
}

EbfpNumber from_text(std::string_view text, const EbfpParams& params) {
  params.validate();
  auto bad = [&](const char* why) {
    return std::invalid_argument(std::string("from_text: ") + why + " in '" +
                                 std::string(text) + "'");
  };
  if (text.size() < 3 || (text[0] != '+' && text[0] != '-') || text[1] != '|') {
    throw bad("missing sign");
  }
  const int sign = text[0] == '-' ? -1 : 1;
  const std::size_t bar = text.find('|', 2);
  if (bar == std::string_view::npos) throw bad("missing field separator");
  const std::string code(text.substr(2, bar - 2));
  const std::string_view rest = text.substr(bar + 1);
  if (code == "ovf" || code == "unf") {
    if (!rest.empty()) throw bad("saturated value with blocks");
    return EbfpNumber::saturated(code == "ovf" ? EbfpFlag::overflow : EbfpFlag::underflow, sign);
  }
  if (code.empty() || code.find_first_not_of("0123456789") != std::string::npos) {
    throw bad("bad exponent code");
  }
  const unsigned long exp_code = std::stoul(code);
  if (exp_code > static_cast<unsigned long>(params.max_code())) throw bad("exponent code too large");

  std::vector<std::uint32_t> blocks;
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    std::size_t dot = rest.find('.', pos);
    if (dot == std::string_view::npos) dot = rest.size();
    const std::string hex(rest.substr(pos, dot - pos));
    if (hex.empty() || hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos ||
        hex.size() > 8) {
      throw bad("bad block");
    }
    const unsigned long v = std::stoul(hex, nullptr, 16);
    if (params.F < 32 && v >> params.F) throw bad("block wider than F bits");
    blocks.push_back(static_cast<std::uint32_t>(v));
    pos = dot + 1;
  }
  if (static_cast<int>(blocks.size()) > params.N_max) throw bad("too many blocks");
  const bool all_zero = std::all_of(blocks.begin(), blocks.end(), [](auto b) { return b == 0; });
  if (exp_code == 0) {
    if (!all_zero || sign < 0) throw bad("noncanonical zero");
    return EbfpNumber::zero(static_cast<int>(blocks.size()));
  }
  if (blocks.front() == 0) throw bad("first block is zero");
  return EbfpCodec::make(sign, static_cast<std::uint32_t>(exp_code), std::move(blocks),
                         EbfpFlag::normal);
}

}  // namespace varprec
