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


// varprec: experiment runner. Every command writes CSV plus a JSON manifest
// into --out-dir and echoes the CSV to stdout.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "manifest.hpp"
#include "run_config.hpp"
#include "varprec/ebfp.hpp"
#include "varprec/error_model.hpp"
#include "varprec/mimo.hpp"
#include "varprec/vpc.hpp"

namespace fs = std::filesystem;
using namespace varprec;
using varprec::cli::RunManifest;

namespace {

constexpr double kTableIITol = 0.03;

// exit codes
constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kBadInput = 2;

fs::path write_csv(const fs::path& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
  std::cout << body;
  return p;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Common {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

// ---- validate-error-model ----

int cmd_validate(const Common& c, std::uint64_t samples, double sigma) {
  struct Row { ArithOp op; double a, b; };
  const Row rows[] = {{ArithOp::add, 1.5, 2.25},
                      {ArithOp::sub, 3.0, 1.25},
                      {ArithOp::mul, 1.7, -2.3},
                      {ArithOp::div, 3.1, 0.7},
                      {ArithOp::sqrt, 2.5, 0.0}};
  std::ostringstream csv;
  csv << "arithmetic,formula_variance,empirical_variance,rel_dev,samples,seed\n";
  bool ok = true;
  for (const Row& r : rows) {
    const auto chk = check_full_precision(r.op, r.a, r.b, sigma, samples, c.seed);
    ok = ok && chk.rel_dev < kTableIITol;
    csv << to_string(r.op) << ',' << g17(chk.formula_variance) << ',' << g17(chk.empirical_variance)
        << ',' << g17(chk.rel_dev) << ',' << samples << ',' << c.seed << '\n';
  }
  RunManifest m("validate-error-model", c.seed);
  m.param("samples", samples);
  m.param("sigma", sigma);
  m.param("tolerance", kTableIITol);
  m.output(write_csv(c.out_dir, "validate-error-model.csv", csv.str()));
  m.write(c.out_dir);
  if (!ok) std::cerr << "error model validation FAILED (rel_dev >= " << kTableIITol << ")\n";
  return ok ? kOk : kValidationFailed;
}

// ---- tables ----

int cmd_tables(const Common& c, const std::string& which, std::uint64_t samples) {
  std::ostringstream csv;
  if (which == "spec") {
    const EbfpParams p{8, 8, 16};
    const std::map<int, double> ref_err{{3, 9.72e-4}, {5, 1.48e-8}, {9, 3.46e-18}};
    csv << "format,total_bits,exponent_bits,fraction_bits,log10_max,worst_rel_error,"
           "ref_log10_max,ref_worst_rel_error,rel_deviation\n";
    for (const auto& [n, err] : ref_err) {
      const SpecRow r = spec_table(p, n);
      csv << "eBFP N" << n << ',' << r.total_bits << ',' << r.exponent_bits << ',' << r.fraction_bits
          << ',' << g17(r.log10_max) << ',' << g17(r.worst_rel_error) << ",154.13," << g17(err) << ','
          << g17((r.worst_rel_error - err) / err) << '\n';
    }
  } else if (which == "w_moments") {
    const std::map<int, double> ref{{1, 0.353}, {3, 0.213}, {5, 0.179}, {7, 0.170},
                                      {9, 0.167}, {11, 0.167}, {13, 0.167}};
    csv << "x,w_var,w_mean,ref_w_var,deviation,samples,seed\n";
    for (const auto& [x, v] : ref) {
      const WMoments m = w_moments(x, samples, c.seed);
      csv << x << ',' << g17(m.variance) << ',' << g17(m.mean) << ',' << v << ','
          << g17(m.variance - v) << ',' << samples << ',' << c.seed << '\n';
    }
    csv << "inf," << g17(w_pdf_second_moment()) << ",0,0.167," << g17(w_pdf_second_moment() - 0.167)
        << ",0,0\n";
  } else {
    csv << "e_b,arithmetic,ops_per_bit,reference,deviation\n";
    const int eb[] = {5, 8, 11};
    const int add[] = {9, 63, 493};
    const int sub[] = {3, 30, 245};
    for (int i = 0; i < 3; ++i) {
      const int a = ops_per_bit(ArithOp::add, eb[i]);
      const int s = ops_per_bit(ArithOp::sub, eb[i]);
      csv << eb[i] << ",add," << a << ',' << add[i] << ',' << a - add[i] << '\n';
      csv << eb[i] << ",sub," << s << ',' << sub[i] << ',' << s - sub[i] << '\n';
    }
  }
  RunManifest m("tables-" + which, c.seed);
  m.param("table", which);
  if (which == "w_moments") m.param("samples", samples);
  m.output(write_csv(c.out_dir, "table-" + which + ".csv", csv.str()));
  m.write(c.out_dir);
  return kOk;
}

// ---- pareto ----

struct ParetoArgs {
  std::string config;
  int trials = 0;
  int nt = 0;
  int k = 0;
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  std::string schemes;
  std::string sweep;
  std::uint64_t ber_symbols = 0;
  bool seed_given = false;
};

int cmd_pareto(const Common& c, const ParetoArgs& a) {
  SimConfig cfg = a.config.empty() ? SimConfig{} : cli::load_sim_config(a.config);
  if (a.trials) cfg.trials = a.trials;
  if (a.nt) cfg.nt = a.nt;
  if (a.k) cfg.k = a.k;
  if (!std::isnan(a.snr_db)) cfg.snr_db = a.snr_db;
  if (!a.schemes.empty()) cfg.schemes = cli::parse_schemes(a.schemes);
  if (!a.sweep.empty()) cfg.sweep = cli::parse_number_list(a.sweep);
  if (a.ber_symbols) cfg.ber_symbols = a.ber_symbols;
  if (a.seed_given) cfg.seed = c.seed;
  cfg.validate();

  const SweepResult r = pareto_sweep(cfg);
  RunManifest m("pareto", cfg.seed);
  for (const auto& [key, value] : cli::describe(cfg)) m.param(key, value);
  if (!a.config.empty()) m.param("config_file", fs::path(a.config).filename().string());
  m.param("reference_rate_mean", r.reference_rate_mean);
  m.param("op_count_trial0", r.op_count);
  int failures = 0;
  for (const SweepPoint& p : r.points) failures += p.failures;
  m.param("failed_trials", failures);
  if (cfg.nt >= 8 && cfg.trials >= 100) m.flag("full-scale configuration (long-running)");
  m.output(write_csv(c.out_dir, "pareto.csv", sweep_csv(r)));
  m.write(c.out_dir);
  return kOk;
}

// ---- histogram / graph / audit ----

int cmd_histogram(const Common& c, int nt, int k, double bits) {
  const HistogramResult h = precision_histogram(nt, k, c.seed, bits);
  RunManifest m("histogram", c.seed);
  m.param("nt", nt);
  m.param("k", k);
  m.param("target_avg_bits", bits);
  m.param("alpha", h.alpha);
  m.param("op_count", h.op_count);
  m.param("realized_avg_bits", h.metrics.avg_bits);
  m.output(write_csv(c.out_dir, "histogram.csv", histogram_csv(h)));
  m.write(c.out_dir);
  return kOk;
}

int cmd_graph(const Common& c, int nt, int k, const std::string& scheme, int bits, double alpha) {
  std::mt19937_64 rng(c.seed);
  const ChannelMatrix h = gen_channel(rng, k, nt);
  const ZfGraph zf = build_zf_graph(k, nt, choose_pivots(h));
  UtilityConfig u;
  u.alpha = alpha;
  const ComplexityModel cm;
  PrecisionPlan plan;
  switch (cli::parse_scheme(scheme)) {
    case PlanKind::fixed: plan = fixed_plan(zf.graph, bits); break;
    case PlanKind::offline: plan = offline_vpc(zf.graph, u, cm); break;
    case PlanKind::online:
      plan = online_vpc(zf.graph, u, cm, zf_inputs(zf, h), {kChannelInputBits},
                        {kDefaultParams, {}, false}).plan;
      break;
    case PlanKind::random_blockwise: {
      std::mt19937_64 prng(c.seed + 1);
      plan = random_blockwise_plan(zf.graph, prng, std::max(1, bits - 3), bits + 3);
      break;
    }
  }
  fs::create_directories(c.out_dir);
  const fs::path gpath = fs::path(c.out_dir) / "zf_graph.jsonl";
  {
    std::ofstream out(gpath, std::ios::binary);
    out << to_jsonl(zf.graph, &plan);
  }
  RunManifest m("graph", c.seed);
  m.param("nt", nt);
  m.param("k", k);
  m.param("scheme", scheme);
  m.param("bits", bits);
  m.param("alpha", alpha);
  const PlanMetrics pm = plan_metrics(zf.graph, plan, cm);
  m.param("avg_bits", pm.avg_bits);
  m.param("total_complexity", pm.total_complexity);
  m.output(gpath);
  m.output(write_csv(c.out_dir, "plan.csv", plan_to_csv(zf.graph, plan)));
  m.write(c.out_dir);
  return kOk;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_audit(const Common& c, const std::string& graph_path, const std::string& plan_path) {
  const GraphDump d = from_jsonl(read_file(graph_path));
  PrecisionPlan plan = d.plan;
  if (!plan_path.empty()) {
    plan = plan_from_csv(read_file(plan_path), d.graph);
  } else if (!d.has_precision) {
    throw std::invalid_argument("graph dump carries no precision; pass --plan");
  }
  std::map<std::pair<int, int>, int> bins;
  for (const ExprNode& n : d.graph.nodes()) {
    if (n.op != OpKind::input) ++bins[{plan.x[static_cast<std::size_t>(n.id)], static_cast<int>(n.op)}];
  }
  HistogramResult h;
  for (const auto& [key, count] : bins) {
    h.bins.push_back({key.first, static_cast<OpKind>(key.second), count});
    h.op_count += count;
  }
  const PlanMetrics pm = plan_metrics(d.graph, plan, {});
  RunManifest m("audit", c.seed);
  m.param("graph", fs::path(graph_path).filename().string());
  m.param("graph_sha256", cli::sha256_file(graph_path));
  if (!plan_path.empty()) m.param("plan_sha256", cli::sha256_file(plan_path));
  m.param("op_count", h.op_count);
  m.param("avg_bits", pm.avg_bits);
  m.param("total_complexity", pm.total_complexity);
  m.output(write_csv(c.out_dir, "audit.csv", histogram_csv(h)));
  m.write(c.out_dir);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variable-precision computing experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  app.add_option("--out-dir", common.out_dir, "directory for CSV and manifest files")->capture_default_str();

  auto samples_check = CLI::Validator(
      [](std::string& v) -> std::string {
        return std::stoull(v) >= 2 ? std::string() : std::string("samples must be >= 2");
      },
      "INT>=2");

  std::uint64_t samples = 1000000;
  double sigma = 1e-3;
  auto* validate = app.add_subcommand("validate-error-model", "Monte Carlo check of the error propagation formulas");
  validate->add_option("--samples", samples, "Monte Carlo samples per arithmetic")
      ->check(samples_check)->capture_default_str();
  validate->add_option("--sigma", sigma, "operand relative error (std dev)")
      ->check(CLI::Range(1e-12, 1e-1))->capture_default_str();

  std::string which;
  std::uint64_t table_samples = 1000000;
  auto* tables = app.add_subcommand("tables", "reproduce a reference table");
  tables->add_option("table", which, "spec | w_moments | ops_per_bit")
      ->required()->check(CLI::IsMember({"spec", "w_moments", "ops_per_bit"}));
  tables->add_option("--samples", table_samples, "Monte Carlo samples (w_moments)")
      ->check(samples_check)->capture_default_str();

  ParetoArgs pa;
  auto* pareto = app.add_subcommand("pareto", "precision / sum-rate sweep over computing schemes");
  pareto->add_option("--config", pa.config, "flat key = value config file")->check(CLI::ExistingFile);
  pareto->add_option("--trials", pa.trials, "channels per sweep point")->check(CLI::PositiveNumber);
  pareto->add_option("--nt", pa.nt, "transmit antennas")->check(CLI::PositiveNumber);
  pareto->add_option("--k", pa.k, "users")->check(CLI::PositiveNumber);
  pareto->add_option("--snr-db", pa.snr_db, "transmit power over noise (dB)");
  pareto->add_option("--scheme", pa.schemes, "comma list of fixed, offline, online, random-blockwise");
  pareto->add_option("--sweep", pa.sweep, "comma list of target average precisions (bits)");
  pareto->add_option("--ber-symbols", pa.ber_symbols, "QPSK symbols per channel, 0 skips BER");

  int h_nt = 8, h_k = 8;
  double h_bits = 12.0;
  auto* hist = app.add_subcommand("histogram", "per-operation precision histogram of one online run");
  hist->add_option("--nt", h_nt, "transmit antennas")->check(CLI::PositiveNumber)->capture_default_str();
  hist->add_option("--k", h_k, "users")->check(CLI::PositiveNumber)->capture_default_str();
  hist->add_option("--bits", h_bits, "target average precision")->check(CLI::Range(1.0, 64.0))->capture_default_str();

  int g_nt = 4, g_k = 4, g_bits = 12;
  double g_alpha = 1e-9;
  std::string g_scheme = "online";
  auto* graph = app.add_subcommand("graph", "dump the ZF graph and one precision plan");
  graph->add_option("--nt", g_nt, "transmit antennas")->check(CLI::PositiveNumber)->capture_default_str();
  graph->add_option("--k", g_k, "users")->check(CLI::PositiveNumber)->capture_default_str();
  graph->add_option("--scheme", g_scheme, "fixed | offline | online | random-blockwise")->capture_default_str();
  graph->add_option("--bits", g_bits, "precision for fixed, window centre for random-blockwise")
      ->check(CLI::Range(1, 64))->capture_default_str();
  graph->add_option("--alpha", g_alpha, "complexity weight for offline/online")
      ->check(CLI::PositiveNumber)->capture_default_str();

  std::string a_graph, a_plan;
  auto* audit = app.add_subcommand("audit", "histogram and metrics of a dumped graph/plan");
  audit->add_option("--graph", a_graph, "graph dump (JSON lines)")->required()->check(CLI::ExistingFile);
  audit->add_option("--plan", a_plan, "plan CSV overriding the dump's precision")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  pa.seed_given = app.get_option("--seed")->count() > 0;

  try {
    if (*validate) return cmd_validate(common, samples, sigma);
    if (*tables) return cmd_tables(common, which, table_samples);
    if (*pareto) return cmd_pareto(common, pa);
    if (*hist) return cmd_histogram(common, h_nt, h_k, h_bits);
    if (*graph) return cmd_graph(common, g_nt, g_k, g_scheme, g_bits, g_alpha);
    if (*audit) return cmd_audit(common, a_graph, a_plan);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kOk;
}
