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

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "varprec/expr_graph.hpp"
#include "varprec/vpc.hpp"

namespace varprec {

using cplx = std::complex<double>;

/// k_users x n_t complex matrix, row major. Entries are doubles, hence exact
/// dyadic rationals.
struct ChannelMatrix {
  int k = 0;
  int nt = 0;
  std::vector<cplx> h;

  cplx at(int r, int c) const { return h[static_cast<std::size_t>(r * nt + c)]; }
};

/// i.i.d. CN(0, 1) entries.
ChannelMatrix gen_channel(std::mt19937_64& rng, int k_users, int n_t);

/// Row swaps of Gauss-Jordan with partial pivoting on the Gram matrix HH^H,
/// decided in double precision: pivots[c] is the row swapped into row c.
/// Throws std::domain_error if a pivot column is zero.
std::vector<int> choose_pivots(const ChannelMatrix& h);

/// Signed reference to a graph node or to the constants 0 and 1.
struct Term {
  enum Kind : std::uint8_t { zero, one, node };
  Kind kind = zero;
  int id = -1;
  bool neg = false;
};

struct ComplexTerm {
  Term re;
  Term im;
};

/// Part labels of the precoder graph.
enum ZfPart : int { kGramPart = 1, kInversePart = 2, kProductPart = 3 };

/// W = H^H (HH^H)^-1 recorded as real arithmetic.
///
/// Part 1 forms the Hermitian Gram matrix (upper triangle and real diagonal),
/// part 2 inverts it by Gauss-Jordan elimination with the given row swaps
/// (complex division through the conjugate and |d|^2), part 3 multiplies by
/// H^H. A complex product costs 4 mul, 1 add and 1 sub; negation and
/// conjugation are free; exact zeros and ones are folded away.
struct ZfGraph {
  int k = 0;
  int nt = 0;
  std::vector<int> pivots;
  ExprGraph graph;
  std::vector<ComplexTerm> w;  // n_t x k, row major
  int one_input = -1;          // input slot holding the constant 1, or -1
};

/// Throws std::invalid_argument unless 1 <= k_users <= n_t. Empty pivots
/// means no row swaps.
ZfGraph build_zf_graph(int k_users, int n_t, const std::vector<int>& pivots = {});

/// Input values in graph input order: Re/Im of H row by row, then the constant 1.
std::vector<ExactRational> zf_inputs(const ZfGraph& zf, const ChannelMatrix& h);

/// Computed precoder (n_t x k) from an execution.
std::vector<cplx> extract_w(const ZfGraph& zf, const ExecutionResult& r,
                            const EbfpParams& p = kDefaultParams);

/// Input storage precision for channel entries: a double's 52 fraction bits.
inline constexpr int kChannelInputBits = 52;

struct ZfReference {
  std::vector<cplx> w;
  double residual = 0.0;  // max |HW - I| entry
  double condition = 0.0; // 1-norm condition number of HH^H
  std::string warning;    // set when condition > 1e9
};

/// Precoder at 64 fraction bits everywhere.
ZfReference zf_reference(const ChannelMatrix& h);

/// Double-precision precoder (Gauss-Jordan with partial pivoting).
std::vector<cplx> zf_double(const ChannelMatrix& h);

/// HW (k x k) in double precision.
std::vector<cplx> effective_channel(const ChannelMatrix& h, const std::vector<cplx>& w);

/// Largest off-diagonal magnitude of HW.
double offdiag_residual(const ChannelMatrix& h, const std::vector<cplx>& w);

/// Sum rate with unit-norm precoder columns and equal power 1/k per user.
double sum_rate(const ChannelMatrix& h, const std::vector<cplx>& w, double snr_db);

/// Uncoded QPSK bit error rate over n_symbols symbol vectors; the receiver
/// divides by its effective gain and decides per quadrant.
double ber_sim(const ChannelMatrix& h, const std::vector<cplx>& w, double snr_db,
               std::uint64_t n_symbols, std::mt19937_64& rng);

struct SimConfig {
  int nt = 4;
  int k = 4;
  double snr_db = 10.0;
  int trials = 20;
  std::uint64_t seed = 1;
  std::vector<PlanKind> schemes{PlanKind::fixed, PlanKind::offline, PlanKind::online,
                                PlanKind::random_blockwise};
  std::vector<double> sweep{4, 5, 6, 7, 8, 9, 10, 11, 12, 16, 24, 32, 40};
  std::uint64_t ber_symbols = 0;  // 0 skips BER
  double match_tol = 0.25;        // bits
  UtilityConfig utility;
  ComplexityModel complexity;
  int threads = 0;                // 0: VARPREC_THREADS or hardware concurrency

  /// Throws std::invalid_argument on invalid settings.
  void validate() const;
};

struct SweepPoint {
  PlanKind scheme = PlanKind::fixed;
  double target_avg_bits = 0.0;
  double realized_avg_bits = 0.0;
  double total_complexity = 0.0;
  double sum_rate_mean = 0.0;
  double sum_rate_stderr = 0.0;
  double ber = -1.0;  // -1 when not simulated
  int trials = 0;
  int failures = 0;   // trials whose execution failed (rate counted as 0)
  std::uint64_t seed = 0;
  double alpha = 0.0; // offline/online only
  std::vector<double> rates;  // per trial, paired across schemes
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<double> reference_rates;  // per trial at 64 bits
  double reference_rate_mean = 0.0;
  int op_count = 0;                     // arithmetic nodes of trial 0's graph
};

SweepResult pareto_sweep(const SimConfig& cfg);

/// Header `scheme,target_avg_bits,realized_avg_bits,total_complexity,
/// sum_rate_mean,sum_rate_stderr,ber,trials,seed`.
std::string sweep_csv(const SweepResult& r);

/// Sum rate of `scheme` interpolated at avg_bits (linear in the realized
/// average); NaN outside the scheme's range.
double interpolate_rate(const SweepResult& r, PlanKind scheme, double avg_bits);

struct HistogramBin {
  int x_bits = 0;
  OpKind op = OpKind::add;
  int count = 0;
};

struct HistogramResult {
  std::vector<HistogramBin> bins;  // sorted by x, then op
  int op_count = 0;
  double alpha = 0.0;
  PlanMetrics metrics;
};

/// Online VPC on one seeded channel; alpha chosen so the weighted average
/// precision is close to target_avg_bits.
HistogramResult precision_histogram(int n_t, int k_users, std::uint64_t seed,
                                    double target_avg_bits = 12.0,
                                    const UtilityConfig& base = {},
                                    const ComplexityModel& cm = {});

/// Header `x_bits,op_kind,count`.
std::string histogram_csv(const HistogramResult& h);

/// Number of worker threads for trials: VARPREC_THREADS if set, else the
/// hardware concurrency, at least 1.
int trial_threads(int requested = 0);

}  // namespace varprec
