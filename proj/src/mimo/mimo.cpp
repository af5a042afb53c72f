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


#include "varprec/mimo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace varprec {

ChannelMatrix gen_channel(std::mt19937_64& rng, int k_users, int n_t) {
  if (k_users < 1 || n_t < 1) throw std::invalid_argument("gen_channel: dimensions must be >= 1");
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  ChannelMatrix h;
  h.k = k_users;
  h.nt = n_t;
  h.h.resize(static_cast<std::size_t>(k_users * n_t));
  for (cplx& v : h.h) {
    const double re = nd(rng);
    const double im = nd(rng);
    v = {re, im};
  }
  return h;
}

namespace {

using CMat = std::vector<std::vector<cplx>>;

CMat gram_double(const ChannelMatrix& h) {
  CMat g(static_cast<std::size_t>(h.k), std::vector<cplx>(static_cast<std::size_t>(h.k)));
  for (int i = 0; i < h.k; ++i) {
    for (int j = 0; j < h.k; ++j) {
      cplx s = 0.0;
      for (int l = 0; l < h.nt; ++l) s += h.at(i, l) * std::conj(h.at(j, l));
      g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
    }
  }
  return g;
}

// Gauss-Jordan with partial pivoting on [G | I]; returns G^-1 and the swaps.
CMat invert_double(CMat a, std::vector<int>* pivots) {
  const std::size_t k = a.size();
  for (std::size_t i = 0; i < k; ++i) {
    a[i].resize(2 * k, 0.0);
    a[i][k + i] = 1.0;
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t best = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[best][c])) best = r;
    }
    if (std::abs(a[best][c]) == 0.0) throw std::domain_error("singular Gram matrix");
    if (pivots) pivots->push_back(static_cast<int>(best));
    std::swap(a[c], a[best]);
    const cplx p = a[c][c];
    for (std::size_t j = c; j < 2 * k; ++j) a[c][j] /= p;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const cplx f = a[r][c];
      for (std::size_t j = c; j < 2 * k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  CMat inv(k, std::vector<cplx>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) inv[i][j] = a[i][k + j];
  }
  return inv;
}

double norm1(const CMat& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i][j]);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

std::vector<int> choose_pivots(const ChannelMatrix& h) {
  std::vector<int> piv;
  invert_double(gram_double(h), &piv);
  return piv;
}

std::vector<cplx> zf_double(const ChannelMatrix& h) {
  const CMat inv = invert_double(gram_double(h), nullptr);
  std::vector<cplx> w(static_cast<std::size_t>(h.nt * h.k));
  for (int i = 0; i < h.nt; ++i) {
    for (int j = 0; j < h.k; ++j) {
      cplx s = 0.0;
      for (int l = 0; l < h.k; ++l) {
        s += std::conj(h.at(l, i)) * inv[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
      }
      w[static_cast<std::size_t>(i * h.k + j)] = s;
    }
  }
  return w;
}

namespace {

class ZfBuilder {
 public:
  explicit ZfBuilder(ZfGraph& z) : z_(z) {}

  void set_part(int part) { part_ = part; }

  Term input() { return {Term::node, z_.graph.input(0), false}; }

  static bool is_zero(const Term& t) { return t.kind == Term::zero; }
  static Term zero() { return {}; }
  static Term one() { return {Term::one, -1, false}; }
  static Term neg(Term t) {
    t.neg = !t.neg;
    return t;
  }

  Term mul(const Term& a, const Term& b) {
    if (is_zero(a) || is_zero(b)) return zero();
    if (a.kind == Term::one) return a.neg ? neg(b) : b;
    if (b.kind == Term::one) return b.neg ? neg(a) : a;
    return {Term::node, z_.graph.record(OpKind::mul, {a.id, b.id}, part_), a.neg != b.neg};
  }

  Term div(const Term& a, const Term& b) {
    if (is_zero(b)) throw std::domain_error("zero pivot");
    if (is_zero(a)) return zero();
    if (b.kind == Term::one) return b.neg ? neg(a) : a;
    const Term num = materialize(a);
    return {Term::node, z_.graph.record(OpKind::div, {num.id, b.id}, part_), num.neg != b.neg};
  }

  Term add(const Term& a, const Term& b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    const Term x = materialize(a);
    const Term y = materialize(b);
    if (x.neg == y.neg) {
      return {Term::node, z_.graph.record(OpKind::add, {x.id, y.id}, part_), x.neg};
    }
    if (x.neg) return {Term::node, z_.graph.record(OpKind::sub, {y.id, x.id}, part_), false};
    return {Term::node, z_.graph.record(OpKind::sub, {x.id, y.id}, part_), false};
  }

  Term sub(const Term& a, const Term& b) { return add(a, neg(b)); }

  ComplexTerm cmul(const ComplexTerm& x, const ComplexTerm& y) {
    const Term rr = mul(x.re, y.re);
    const Term ii = mul(x.im, y.im);
    const Term ri = mul(x.re, y.im);
    const Term ir = mul(x.im, y.re);
    return {sub(rr, ii), add(ri, ir)};
  }

  ComplexTerm cadd(const ComplexTerm& x, const ComplexTerm& y) {
    return {add(x.re, y.re), add(x.im, y.im)};
  }

  ComplexTerm csub(const ComplexTerm& x, const ComplexTerm& y) {
    return {sub(x.re, y.re), sub(x.im, y.im)};
  }

  static ComplexTerm conj(const ComplexTerm& x) { return {x.re, neg(x.im)}; }
  static bool is_zero(const ComplexTerm& x) { return is_zero(x.re) && is_zero(x.im); }

 private:
  Term materialize(const Term& t) {
    if (t.kind != Term::one) return t;
    if (one_id_ < 0) {
      one_id_ = z_.graph.input(0);
      z_.one_input = static_cast<int>(z_.graph.inputs().size()) - 1;
    }
    return {Term::node, one_id_, t.neg};
  }

  ZfGraph& z_;
  int part_ = 0;
  int one_id_ = -1;
};

}  // namespace

ZfGraph build_zf_graph(int k_users, int n_t, const std::vector<int>& pivots) {
  if (k_users < 1 || n_t < 1 || k_users > n_t) {
    throw std::invalid_argument("build_zf_graph: need 1 <= k_users <= n_t");
  }
  const auto K = static_cast<std::size_t>(k_users);
  const auto NT = static_cast<std::size_t>(n_t);
  if (!pivots.empty() && pivots.size() != K) throw std::invalid_argument("build_zf_graph: bad pivot list");

  ZfGraph z;
  z.k = k_users;
  z.nt = n_t;
  z.pivots = pivots;
  ZfBuilder b(z);

  std::vector<ComplexTerm> h(K * NT);
  for (ComplexTerm& e : h) {
    e.re = b.input();
    e.im = b.input();
  }
  auto H = [&](std::size_t r, std::size_t c) -> const ComplexTerm& { return h[r * NT + c]; };

  // part 1: Gram matrix, upper triangle plus real diagonal
  b.set_part(kGramPart);
  std::vector<std::vector<ComplexTerm>> a(K, std::vector<ComplexTerm>(2 * K));
  for (std::size_t i = 0; i < K; ++i) {
    Term d = ZfBuilder::zero();
    for (std::size_t l = 0; l < NT; ++l) {
      d = b.add(d, b.add(b.mul(H(i, l).re, H(i, l).re), b.mul(H(i, l).im, H(i, l).im)));
    }
    a[i][i] = {d, ZfBuilder::zero()};
    for (std::size_t j = i + 1; j < K; ++j) {
      ComplexTerm s;
      for (std::size_t l = 0; l < NT; ++l) s = b.cadd(s, b.cmul(H(i, l), ZfBuilder::conj(H(j, l))));
      a[i][j] = s;
      a[j][i] = ZfBuilder::conj(s);
    }
    a[i][K + i] = {ZfBuilder::one(), ZfBuilder::zero()};
  }

  // part 2: Gauss-Jordan on [G | I]
  b.set_part(kInversePart);
  for (std::size_t c = 0; c < K; ++c) {
    if (!pivots.empty()) {
      const auto p = static_cast<std::size_t>(pivots[c]);
      if (p < c || p >= K) throw std::invalid_argument("build_zf_graph: pivot out of range");
      std::swap(a[c], a[p]);
    }
    const ComplexTerm p = a[c][c];
    if (ZfBuilder::is_zero(p)) throw std::domain_error("build_zf_graph: structurally zero pivot");
    const bool real_pivot = ZfBuilder::is_zero(p.im);
    Term mag2;
    if (!real_pivot) mag2 = b.add(b.mul(p.re, p.re), b.mul(p.im, p.im));
    for (std::size_t j = c + 1; j < 2 * K; ++j) {
      ComplexTerm& e = a[c][j];
      if (ZfBuilder::is_zero(e)) continue;
      if (real_pivot) {
        e = {b.div(e.re, p.re), b.div(e.im, p.re)};
      } else {
        const ComplexTerm num = b.cmul(e, ZfBuilder::conj(p));
        e = {b.div(num.re, mag2), b.div(num.im, mag2)};
      }
    }
    a[c][c] = {ZfBuilder::one(), ZfBuilder::zero()};
    for (std::size_t r = 0; r < K; ++r) {
      if (r == c) continue;
      const ComplexTerm f = a[r][c];
      if (ZfBuilder::is_zero(f)) continue;
      for (std::size_t j = c + 1; j < 2 * K; ++j) {
        if (ZfBuilder::is_zero(a[c][j])) continue;
        a[r][j] = b.csub(a[r][j], b.cmul(f, a[c][j]));
      }
      a[r][c] = {};
    }
  }

  // part 3: W = H^H G^-1
  b.set_part(kProductPart);
  z.w.resize(NT * K);
  for (std::size_t i = 0; i < NT; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      ComplexTerm s;
      for (std::size_t l = 0; l < K; ++l) s = b.cadd(s, b.cmul(ZfBuilder::conj(H(l, i)), a[l][K + j]));
      z.w[i * K + j] = s;
    }
  }
  for (const ComplexTerm& t : z.w) {
    if (t.re.kind == Term::node) z.graph.mark_output(t.re.id);
    if (t.im.kind == Term::node) z.graph.mark_output(t.im.id);
  }
  return z;
}

std::vector<ExactRational> zf_inputs(const ZfGraph& zf, const ChannelMatrix& h) {
  if (h.k != zf.k || h.nt != zf.nt) throw std::invalid_argument("zf_inputs: shape mismatch");
  std::vector<ExactRational> v;
  v.reserve(zf.graph.inputs().size());
  for (const cplx& e : h.h) {
    v.push_back(ExactRational::from_double(e.real()));
    v.push_back(ExactRational::from_double(e.imag()));
  }
  if (zf.one_input >= 0) v.emplace_back(1);
  return v;
}

std::vector<cplx> extract_w(const ZfGraph& zf, const ExecutionResult& r, const EbfpParams& p) {
  auto val = [&](const Term& t) {
    double v = 0.0;
    if (t.kind == Term::one) v = 1.0;
    if (t.kind == Term::node) v = r.value(t.id, p);
    return t.neg ? -v : v;
  };
  std::vector<cplx> w;
  w.reserve(zf.w.size());
  for (const ComplexTerm& t : zf.w) w.emplace_back(val(t.re), val(t.im));
  return w;
}

std::vector<cplx> effective_channel(const ChannelMatrix& h, const std::vector<cplx>& w) {
  std::vector<cplx> g(static_cast<std::size_t>(h.k * h.k));
  for (int i = 0; i < h.k; ++i) {
    for (int j = 0; j < h.k; ++j) {
      cplx s = 0.0;
      for (int l = 0; l < h.nt; ++l) s += h.at(i, l) * w[static_cast<std::size_t>(l * h.k + j)];
      g[static_cast<std::size_t>(i * h.k + j)] = s;
    }
  }
  return g;
}

double offdiag_residual(const ChannelMatrix& h, const std::vector<cplx>& w) {
  const auto g = effective_channel(h, w);
  double worst = 0.0;
  for (int i = 0; i < h.k; ++i) {
    for (int j = 0; j < h.k; ++j) {
      if (i != j) worst = std::max(worst, std::abs(g[static_cast<std::size_t>(i * h.k + j)]));
    }
  }
  return worst;
}

ZfReference zf_reference(const ChannelMatrix& h) {
  const ZfGraph zf = build_zf_graph(h.k, h.nt, choose_pivots(h));
  const ExecutionResult r = execute(zf.graph, fixed_plan(zf.graph, 64), zf_inputs(zf, h),
                                    {kChannelInputBits}, {kDefaultParams, {}, false});
  ZfReference ref;
  ref.w = extract_w(zf, r);
  const auto g = effective_channel(h, ref.w);
  for (int i = 0; i < h.k; ++i) {
    for (int j = 0; j < h.k; ++j) {
      const cplx d = g[static_cast<std::size_t>(i * h.k + j)] - (i == j ? 1.0 : 0.0);
      ref.residual = std::max(ref.residual, std::abs(d));
    }
  }
  const CMat gram = gram_double(h);
  ref.condition = norm1(gram) * norm1(invert_double(gram, nullptr));
  if (ref.condition > 1e9) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ill-conditioned Gram matrix (cond1 = %.3g)", ref.condition);
    ref.warning = buf;
  }
  return ref;
}

namespace {

std::vector<cplx> normalized_columns(const ChannelMatrix& h, const std::vector<cplx>& w) {
  if (w.size() != static_cast<std::size_t>(h.nt * h.k)) throw std::invalid_argument("precoder shape mismatch");
  std::vector<cplx> out = w;
  for (int j = 0; j < h.k; ++j) {
    double n2 = 0.0;
    for (int i = 0; i < h.nt; ++i) n2 += std::norm(w[static_cast<std::size_t>(i * h.k + j)]);
    const double s = n2 > 0.0 && std::isfinite(n2) ? 1.0 / std::sqrt(n2) : 0.0;
    for (int i = 0; i < h.nt; ++i) out[static_cast<std::size_t>(i * h.k + j)] *= s;
  }
  return out;
}

}  // namespace

double sum_rate(const ChannelMatrix& h, const std::vector<cplx>& w, double snr_db) {
  const auto wn = normalized_columns(h, w);
  const auto g = effective_channel(h, wn);
  const double p = 1.0 / h.k;
  const double noise = std::pow(10.0, -snr_db / 10.0);
  double rate = 0.0;
  for (int k = 0; k < h.k; ++k) {
    double interf = 0.0;
    for (int j = 0; j < h.k; ++j) {
      if (j != k) interf += p * std::norm(g[static_cast<std::size_t>(k * h.k + j)]);
    }
    const double sinr = p * std::norm(g[static_cast<std::size_t>(k * h.k + k)]) / (interf + noise);
    rate += std::log2(1.0 + sinr);
  }
  return rate;
}

double ber_sim(const ChannelMatrix& h, const std::vector<cplx>& w, double snr_db,
               std::uint64_t n_symbols, std::mt19937_64& rng) {
  if (n_symbols == 0) throw std::invalid_argument("ber_sim: n_symbols must be > 0");
  const auto wn = normalized_columns(h, w);
  const auto g = effective_channel(h, wn);
  const double amp = std::sqrt(1.0 / h.k);
  const double noise = std::pow(10.0, -snr_db / 10.0);
  std::normal_distribution<double> nd(0.0, std::sqrt(noise / 2.0));
  const double q = 1.0 / std::sqrt(2.0);
  const auto K = static_cast<std::size_t>(h.k);
  std::vector<int> bits(2 * K);
  std::vector<cplx> s(K);
  std::uint64_t errors = 0;
  for (std::uint64_t n = 0; n < n_symbols; ++n) {
    for (std::size_t k = 0; k < K; ++k) {
      const std::uint64_t r = rng();
      bits[2 * k] = static_cast<int>(r & 1);
      bits[2 * k + 1] = static_cast<int>((r >> 1) & 1);
      s[k] = {bits[2 * k] ? -q : q, bits[2 * k + 1] ? -q : q};
    }
    for (std::size_t k = 0; k < K; ++k) {
      cplx y = 0.0;
      for (std::size_t j = 0; j < K; ++j) y += amp * g[k * K + j] * s[j];
      y += cplx(nd(rng), nd(rng));
      const cplx gain = amp * g[k * K + k];
      const cplx est = std::abs(gain) > 0.0 ? y / gain : y;
      errors += static_cast<std::uint64_t>((est.real() < 0.0) != (bits[2 * k] == 1));
      errors += static_cast<std::uint64_t>((est.imag() < 0.0) != (bits[2 * k + 1] == 1));
    }
  }
  return static_cast<double>(errors) / static_cast<double>(2 * K * n_symbols);
}

int trial_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VARPREC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = requested > 0 ? std::min(n, cap) : cap;
  }
  return std::max(1, n);
}

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::mt19937_64 seeded(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

struct Trial {
  ChannelMatrix h;
  ZfGraph zf;
  std::vector<ExactRational> inputs;
  double ref_rate = 0.0;
};

struct TrialOutcome {
  double rate = 0.0;
  double avg = 0.0;
  double total = 0.0;
  double ber = -1.0;
  bool ok = true;
};

struct Evaluation {
  std::vector<TrialOutcome> trials;
  double mean_avg = 0.0;
  double alpha = 0.0;
};

const ExecOptions kSweepExec{kDefaultParams, {}, false};

TrialOutcome finish(const SimConfig& cfg, const Trial& t, int index, const PrecisionPlan& plan,
                    const std::vector<cplx>* w) {
  TrialOutcome o;
  const PlanMetrics m = plan_metrics(t.zf.graph, plan, cfg.complexity);
  o.avg = m.avg_bits;
  o.total = m.total_complexity;
  if (!w) {
    o.ok = false;
    o.rate = 0.0;
    o.ber = cfg.ber_symbols ? 0.5 : -1.0;
    return o;
  }
  o.rate = sum_rate(t.h, *w, cfg.snr_db);
  if (cfg.ber_symbols) {
    auto rng = seeded(cfg.seed, static_cast<std::uint64_t>(index), 0xBE5);
    o.ber = ber_sim(t.h, *w, cfg.snr_db, cfg.ber_symbols, rng);
  }
  return o;
}

TrialOutcome run_plan(const SimConfig& cfg, const Trial& t, int index, const PrecisionPlan& plan) {
  try {
    const ExecutionResult r = execute(t.zf.graph, plan, t.inputs, {kChannelInputBits}, kSweepExec);
    const auto w = extract_w(t.zf, r);
    return finish(cfg, t, index, plan, &w);
  } catch (const GraphError&) {
    return finish(cfg, t, index, plan, nullptr);
  }
}

TrialOutcome run_online(const SimConfig& cfg, const Trial& t, int index, double alpha) {
  UtilityConfig u = cfg.utility;
  u.alpha = alpha;
  try {
    const OnlineResult r = online_vpc(t.zf.graph, u, cfg.complexity, t.inputs, {kChannelInputBits}, kSweepExec);
    const auto w = extract_w(t.zf, r.exec);
    return finish(cfg, t, index, r.plan, &w);
  } catch (const GraphError&) {
    // plan up to the failure is lost; charge the offline plan's metrics
    return finish(cfg, t, index, offline_vpc(t.zf.graph, u, cfg.complexity), nullptr);
  }
}

double mean_avg(const std::vector<TrialOutcome>& v) {
  double s = 0.0;
  for (const auto& o : v) s += o.avg;
  return s / static_cast<double>(v.size());
}

// evaluate(alpha) returns per-trial outcomes; average precision falls with alpha
template <class Eval>
Evaluation match_alpha(double target, double tol, Eval evaluate) {
  double lo = std::log(1e-45);
  double hi = std::log(1e3);
  Evaluation best;
  double best_gap = std::numeric_limits<double>::infinity();
  auto probe = [&](double la) {
    Evaluation e;
    e.alpha = std::exp(la);
    e.trials = evaluate(e.alpha);
    e.mean_avg = mean_avg(e.trials);
    const double gap = std::fabs(e.mean_avg - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = e;
    }
    return e.mean_avg;
  };
  if (probe(hi) >= target || probe(lo) <= target) return best;
  for (int it = 0; it < 40 && best_gap > tol / 5.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

SweepPoint summarize(const SimConfig& cfg, PlanKind scheme, double target, const Evaluation& e) {
  SweepPoint p;
  p.scheme = scheme;
  p.target_avg_bits = target;
  p.trials = static_cast<int>(e.trials.size());
  p.seed = cfg.seed;
  p.alpha = e.alpha;
  double sr = 0.0;
  double sr2 = 0.0;
  double ber = 0.0;
  for (const auto& o : e.trials) {
    p.realized_avg_bits += o.avg;
    p.total_complexity += o.total;
    sr += o.rate;
    sr2 += o.rate * o.rate;
    ber += o.ber;
    p.failures += o.ok ? 0 : 1;
    p.rates.push_back(o.rate);
  }
  const double n = static_cast<double>(p.trials);
  p.realized_avg_bits /= n;
  p.total_complexity /= n;
  p.sum_rate_mean = sr / n;
  const double var = n > 1 ? std::max(0.0, (sr2 - n * p.sum_rate_mean * p.sum_rate_mean) / (n - 1)) : 0.0;
  p.sum_rate_stderr = std::sqrt(var / n);
  p.ber = cfg.ber_symbols ? ber / n : -1.0;
  return p;
}

}  // namespace

void SimConfig::validate() const {
  if (nt < 1 || k < 1 || k > nt) throw std::invalid_argument("SimConfig: need 1 <= k <= nt");
  if (trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
  if (sweep.empty()) throw std::invalid_argument("SimConfig: empty sweep");
  if (schemes.empty()) throw std::invalid_argument("SimConfig: no schemes");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("SimConfig: snr_db must be finite");
  if (!(match_tol > 0.0)) throw std::invalid_argument("SimConfig: match_tol must be > 0");
  for (double t : sweep) {
    if (!(t >= utility.x_min && t <= utility.x_max)) {
      throw std::invalid_argument("SimConfig: sweep target outside [x_min, x_max]");
    }
  }
  utility.validate();
  complexity.validate();
}

SweepResult pareto_sweep(const SimConfig& cfg) {
  cfg.validate();
  const int threads = trial_threads(cfg.threads);
  std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, threads, [&](int i) {
    auto rng = seeded(cfg.seed, static_cast<std::uint64_t>(i));
    Trial& t = trials[static_cast<std::size_t>(i)];
    t.h = gen_channel(rng, cfg.k, cfg.nt);
    t.zf = build_zf_graph(cfg.k, cfg.nt, choose_pivots(t.h));
    t.inputs = zf_inputs(t.zf, t.h);
    const ExecutionResult r = execute(t.zf.graph, fixed_plan(t.zf.graph, 64), t.inputs,
                                      {kChannelInputBits}, kSweepExec);
    t.ref_rate = sum_rate(t.h, extract_w(t.zf, r), cfg.snr_db);
  });

  SweepResult res;
  res.op_count = topo_stats(trials[0].zf.graph).arithmetic_ops();
  for (const Trial& t : trials) {
    res.reference_rates.push_back(t.ref_rate);
    res.reference_rate_mean += t.ref_rate / cfg.trials;
  }

  auto for_trials = [&](const std::function<TrialOutcome(const Trial&, int)>& fn) {
    std::vector<TrialOutcome> out(trials.size());
    parallel_for(cfg.trials, threads, [&](int i) {
      out[static_cast<std::size_t>(i)] = fn(trials[static_cast<std::size_t>(i)], i);
    });
    return out;
  };

  for (PlanKind scheme : cfg.schemes) {
    for (double target : cfg.sweep) {
      Evaluation e;
      switch (scheme) {
        case PlanKind::fixed: {
          const int x = static_cast<int>(std::lround(target));
          e.trials = for_trials([&](const Trial& t, int i) {
            return run_plan(cfg, t, i, fixed_plan(t.zf.graph, x));
          });
          break;
        }
        case PlanKind::offline:
          e = match_alpha(target, cfg.match_tol, [&](double alpha) {
            UtilityConfig u = cfg.utility;
            u.alpha = alpha;
            return for_trials([&](const Trial& t, int i) {
              return run_plan(cfg, t, i, offline_vpc(t.zf.graph, u, cfg.complexity));
            });
          });
          break;
        case PlanKind::online:
          e = match_alpha(target, cfg.match_tol, [&](double alpha) {
            return for_trials([&](const Trial& t, int i) { return run_online(cfg, t, i, alpha); });
          });
          break;
        case PlanKind::random_blockwise: {
          const int centre = static_cast<int>(std::lround(target));
          const int lo = std::max(cfg.utility.x_min, centre - 3);
          const int hi = std::min(cfg.utility.x_max, centre + 3);
          e.trials = for_trials([&](const Trial& t, int i) {
            auto rng = seeded(cfg.seed, static_cast<std::uint64_t>(i),
                              static_cast<std::uint64_t>(std::lround(target * 1000.0)) + 7);
            PrecisionPlan best;
            double gap = std::numeric_limits<double>::infinity();
            for (int attempt = 0; attempt < 10000 && gap > 0.5; ++attempt) {
              PrecisionPlan p = random_blockwise_plan(t.zf.graph, rng, lo, hi);
              const double g = std::fabs(plan_metrics(t.zf.graph, p, cfg.complexity).avg_bits - target);
              if (g < gap) {
                gap = g;
                best = std::move(p);
              }
            }
            return run_plan(cfg, t, i, best);
          });
          break;
        }
      }
      res.points.push_back(summarize(cfg, scheme, target, e));
    }
  }
  return res;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "scheme,target_avg_bits,realized_avg_bits,total_complexity,sum_rate_mean,"
         "sum_rate_stderr,ber,trials,seed\n";
  char buf[256];
  for (const SweepPoint& p : r.points) {
    std::snprintf(buf, sizeof buf, "%s,%g,%.6f,%.6g,%.9g,%.9g,%.9g,%d,%llu\n",
                  std::string(to_string(p.scheme)).c_str(), p.target_avg_bits, p.realized_avg_bits,
                  p.total_complexity, p.sum_rate_mean, p.sum_rate_stderr, p.ber, p.trials,
                  static_cast<unsigned long long>(p.seed));
    out << buf;
  }
  return out.str();
}

double interpolate_rate(const SweepResult& r, PlanKind scheme, double avg_bits) {
  std::vector<std::pair<double, double>> pts;
  for (const SweepPoint& p : r.points) {
    if (p.scheme == scheme) pts.emplace_back(p.realized_avg_bits, p.sum_rate_mean);
  }
  std::sort(pts.begin(), pts.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (pts.empty() || avg_bits < pts.front().first || avg_bits > pts.back().first) return nan;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& [x0, y0] = pts[i];
    const auto& [x1, y1] = pts[i + 1];
    if (avg_bits >= x0 && avg_bits <= x1) {
      if (x1 == x0) return std::max(y0, y1);
      return y0 + (y1 - y0) * (avg_bits - x0) / (x1 - x0);
    }
  }
  return pts.back().second;
}

HistogramResult precision_histogram(int n_t, int k_users, std::uint64_t seed, double target_avg_bits,
                                    const UtilityConfig& base, const ComplexityModel& cm) {
  auto rng = seeded(seed, 0);
  const ChannelMatrix h = gen_channel(rng, k_users, n_t);
  const ZfGraph zf = build_zf_graph(k_users, n_t, choose_pivots(h));
  const auto inputs = zf_inputs(zf, h);

  PrecisionPlan plan;
  const Evaluation e = match_alpha(target_avg_bits, 0.25, [&](double alpha) {
    UtilityConfig u = base;
    u.alpha = alpha;
    const OnlineResult r = online_vpc(zf.graph, u, cm, inputs, {kChannelInputBits}, kSweepExec);
    TrialOutcome o;
    const PlanMetrics m = plan_metrics(zf.graph, r.plan, cm);
    o.avg = m.avg_bits;
    o.total = m.total_complexity;
    return std::vector<TrialOutcome>{o};
  });
  UtilityConfig u = base;
  u.alpha = e.alpha;
  plan = online_vpc(zf.graph, u, cm, inputs, {kChannelInputBits}, kSweepExec).plan;

  HistogramResult out;
  out.alpha = e.alpha;
  out.metrics = plan_metrics(zf.graph, plan, cm);
  std::map<std::pair<int, int>, int> bins;
  for (const ExprNode& n : zf.graph.nodes()) {
    if (n.op == OpKind::input) continue;
    ++out.op_count;
    ++bins[{plan.x[static_cast<std::size_t>(n.id)], static_cast<int>(n.op)}];
  }
  for (const auto& [key, count] : bins) {
    out.bins.push_back({key.first, static_cast<OpKind>(key.second), count});
  }
  return out;
}

std::string histogram_csv(const HistogramResult& h) {
  std::ostringstream out;
  out << "x_bits,op_kind,count\n";
  for (const HistogramBin& b : h.bins) out << b.x_bits << ',' << to_string(b.op) << ',' << b.count << '\n';
  return out.str();
}

}  // namespace varprec
