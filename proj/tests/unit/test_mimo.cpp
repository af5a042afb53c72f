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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "varprec/mimo.hpp"

using namespace varprec;

namespace {

const ExecOptions kValuesOnly{kDefaultParams, {}, false};

std::vector<cplx> run_fixed(const ChannelMatrix& h, int x) {
  const ZfGraph zf = build_zf_graph(h.k, h.nt, choose_pivots(h));
  const auto r = execute(zf.graph, fixed_plan(zf.graph, x), zf_inputs(zf, h), {kChannelInputBits},
                         kValuesOnly);
  return extract_w(zf, r);
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("channel generation") {
  std::mt19937_64 r1(4), r2(4);
  const ChannelMatrix a = gen_channel(r1, 3, 5);
  const ChannelMatrix b = gen_channel(r2, 3, 5);
  CHECK(a.h == b.h);
  CHECK(a.h.size() == 15);

  std::mt19937_64 rng(1);
  const ChannelMatrix big = gen_channel(rng, 100, 100);
  double s = 0;
  for (const cplx& v : big.h) s += std::norm(v);
  CHECK(s / 1e4 == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(gen_channel(rng, 0, 1), std::invalid_argument);
}

TEST_CASE("scalar channel") {
  ChannelMatrix h{1, 1, {cplx(1.0, 0.0)}};
  const ZfGraph zf = build_zf_graph(1, 1);
  CHECK(topo_stats(zf.graph).arithmetic_ops() == 6);
  const auto w = run_fixed(h, 10);
  CHECK(w[0] == cplx(1.0, 0.0));
}

TEST_CASE("orthonormal rows give the conjugate transpose") {
  ChannelMatrix h{2, 2, {cplx(0.6, 0.0), cplx(0.0, 0.8), cplx(0.8, 0.0), cplx(0.0, -0.6)}};
  const auto w = run_fixed(h, 64);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(w[static_cast<std::size_t>(i * 2 + j)] - std::conj(h.at(j, i))) < 1e-12);
    }
  }
}

TEST_CASE("graph structure") {
  const ZfGraph z = build_zf_graph(8, 8);
  const int ops = topo_stats(z.graph).arithmetic_ops();
  MESSAGE("8x8 basic operations: " << ops);
  CHECK(ops * 3 >= 20168);
  CHECK(ops <= 3 * 20168);
  for (const ExprNode& n : z.graph.nodes()) {
    if (n.op == OpKind::input) continue;
    CHECK((n.part == kGramPart || n.part == kInversePart || n.part == kProductPart));
  }
  CHECK_THROWS_AS(build_zf_graph(3, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_zf_graph(2, 2, {0}), std::invalid_argument);
}

TEST_CASE("reference precoder") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const ChannelMatrix h = gen_channel(rng, 4, 4);
    const ZfReference ref = zf_reference(h);
    if (ref.condition < 1e6) CHECK(ref.residual < 1e-10);
    CHECK(max_diff(ref.w, zf_double(h)) < 1e-8 * ref.condition);
  }
  ChannelMatrix bad{2, 2, {cplx(1, 0), cplx(1, 0), cplx(1, 0), cplx(1 + 1e-7, 0)}};
  CHECK_FALSE(zf_reference(bad).warning.empty());
}

TEST_CASE("residual shrinks with precision") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 5; ++t) {
    const ChannelMatrix h = gen_channel(rng, 4, 4);
    double prev = 1e300;
    for (int x = 8; x <= 56; x += 8) {
      const double r = offdiag_residual(h, run_fixed(h, x));
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("sum rate") {
  std::mt19937_64 rng(6);
  const ChannelMatrix h = gen_channel(rng, 4, 4);
  const auto w = zf_double(h);
  CHECK(sum_rate(h, std::vector<cplx>(16, 0.0), 10.0) == 0.0);
  CHECK(sum_rate(h, w, -200.0) < 1e-15);
  // no interference: closed form from the normalized effective gains
  double expect = 0;
  for (int k = 0; k < 4; ++k) {
    double n2 = 0;
    for (int i = 0; i < 4; ++i) n2 += std::norm(w[static_cast<std::size_t>(i * 4 + k)]);
    const double g = 1.0 / n2;  // |h_k w_k|^2 with h_k w_k = 1
    expect += std::log2(1 + 0.25 * g * 1e3);
  }
  CHECK(sum_rate(h, w, 30.0) == doctest::Approx(expect).epsilon(1e-9));
  CHECK_THROWS_AS(sum_rate(h, std::vector<cplx>(3), 10.0), std::invalid_argument);
}

TEST_CASE("ber limits") {
  std::mt19937_64 rng(7);
  const ChannelMatrix h = gen_channel(rng, 4, 4);
  const auto w = zf_double(h);
  CHECK(ber_sim(h, w, 300.0, 2000, rng) == 0.0);
  const std::uint64_t n = 20000;
  const double ber = ber_sim(h, w, -60.0, n, rng);
  const double sd = std::sqrt(0.25 / (8.0 * n));
  CHECK(std::fabs(ber - 0.5) < 3 * sd);
  CHECK_THROWS_AS(ber_sim(h, w, 10.0, 0, rng), std::invalid_argument);
}

TEST_CASE("sweep smoke") {
  SimConfig cfg;
  cfg.trials = 1;
  cfg.sweep = {8};
  cfg.schemes = {PlanKind::fixed};
  const SweepResult r = pareto_sweep(cfg);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].realized_avg_bits == 8.0);
  // complex pivots cost more than real ones, so the count varies per channel
  CHECK(r.op_count >= 1100);
  CHECK(r.op_count <= 1300);
  CHECK(sweep_csv(r).rfind("scheme,target_avg_bits,realized_avg_bits,total_complexity,sum_rate_mean,"
                           "sum_rate_stderr,ber,trials,seed\n", 0) == 0);
  cfg.trials = 0;
  CHECK_THROWS_AS(pareto_sweep(cfg), std::invalid_argument);
  cfg.trials = 1;
  cfg.sweep = {100};
  CHECK_THROWS_AS(pareto_sweep(cfg), std::invalid_argument);
}

TEST_CASE("sweep is independent of thread count") {
  SimConfig cfg;
  cfg.trials = 4;
  cfg.sweep = {6, 10};
  cfg.nt = cfg.k = 2;
  cfg.ber_symbols = 1000;
  cfg.threads = 1;
  const SweepResult a = pareto_sweep(cfg);
  cfg.threads = 3;
  const SweepResult b = pareto_sweep(cfg);
  CHECK(sweep_csv(a) == sweep_csv(b));
  for (const SweepPoint& p : a.points) {
    if (p.scheme == PlanKind::online || p.scheme == PlanKind::offline) {
      CHECK(std::fabs(p.realized_avg_bits - p.target_avg_bits) < 0.5);
    }
    CHECK(p.ber >= 0.0);
    CHECK(p.ber <= 1.0);
  }
}

TEST_CASE("histogram") {
  const HistogramResult one = precision_histogram(1, 1, 3);
  int total = 0;
  for (const auto& b : one.bins) total += b.count;
  CHECK(total == one.op_count);
  CHECK(one.op_count == 6);
  const HistogramResult a = precision_histogram(3, 3, 9);
  const HistogramResult b = precision_histogram(3, 3, 9);
  CHECK(histogram_csv(a) == histogram_csv(b));
  CHECK(histogram_csv(a).rfind("x_bits,op_kind,count\n", 0) == 0);
}

TEST_CASE("thread cap") {
  CHECK(trial_threads(3) >= 1);
  CHECK(trial_threads(3) <= 3);
}
