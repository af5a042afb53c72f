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


#include "varprec/error_model.hpp"

#include <algorithm>
#include <random>

#include "varprec/kernels.hpp"

namespace varprec {

namespace {

constexpr std::size_t kChunk = 1 << 16;

}  // namespace

double propagate_full_precision(ArithOp op, double a, double b, double sa2, double sb2) {
  switch (op) {
    case ArithOp::add: {
      const double s = a + b;
      if (s == 0.0) throw SingularityError("add: a + b = 0, relative error undefined");
      return (a * a * sa2 + b * b * sb2) / (s * s);
    }
    case ArithOp::sub: {
      const double d = a - b;
      if (d == 0.0) throw SingularityError("sub: a - b = 0, relative error undefined");
      return (a * a * sa2 + b * b * sb2) / (d * d);
    }
    case ArithOp::mul:
      return sa2 + sb2 + sa2 * sb2;
    case ArithOp::div:
      return sa2 + sb2;
    case ArithOp::sqrt:
      return sa2 / 4.0;
  }
  return 0.0;
}

WMoments RoundingModel::moments(int x) const {
  if (x >= 1 && static_cast<std::size_t>(x) <= table.size()) return table[x - 1];
  return w_moments_limit();
}

double rounding_variance(double sc2, int x, const RoundingModel& model, bool exact) {
  if (x < 1) throw std::invalid_argument("rounding_variance: x must be >= 1");
  const WMoments m = model.moments(x);
  return rounding_variance_t<double>(sc2, model.r(x), m.variance, m.mean, exact);
}

double w_pdf(double w) {
  const double a = std::fabs(w);
  if (a > 1.0) throw std::domain_error("w_pdf: |w| > 1");
  if (a <= 0.5) return 0.75;
  return 0.25 * (1.0 / (a * a) - 1.0);
}

double w_pdf_mass() {
  // tails: F(w) = -1/(4w) - w/4
  auto tail = [](double w) { return -0.25 / w - 0.25 * w; };
  return 0.75 + 2.0 * (tail(1.0) - tail(0.5));
}

double w_pdf_second_moment() {
  // centre: w^3/4 ; tails: w/4 - w^3/12
  const double centre = 2.0 * (0.5 * 0.5 * 0.5 / 4.0);
  auto tail = [](double w) { return 0.25 * w - w * w * w / 12.0; };
  return centre + 2.0 * (tail(1.0) - tail(0.5));
}

WMoments w_moments(int x, std::uint64_t samples, std::uint64_t seed) {
  if (x < 1) throw std::invalid_argument("w_moments: x must be >= 1");
  if (samples == 0) throw std::invalid_argument("w_moments: samples must be > 0");
  const kernels::SimdLevel level = kernels::active_simd();
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> bits(kChunk);
  std::vector<double> sig(kChunk);
  kernels::MomentSums total;
  for (std::uint64_t done = 0; done < samples;) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, samples - done));
    for (std::size_t i = 0; i < n; ++i) bits[i] = rng();
    kernels::bits_to_unit_significand(level, bits.data(), sig.data(), n);
    const kernels::MomentSums s = kernels::w_moment_sums(level, sig.data(), n, x);
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
    done += n;
  }
  const double N = static_cast<double>(samples);
  const double mean = total.sum / N;
  return {mean, total.sum_sq / N - mean * mean};
}

std::vector<double> w_histogram(int x, int bins, std::uint64_t samples, std::uint64_t seed) {
  if (bins < 1 || samples == 0) throw std::invalid_argument("w_histogram: bad arguments");
  const kernels::SimdLevel level = kernels::active_simd();
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> bits(kChunk);
  std::vector<double> sig(kChunk);
  std::vector<double> rounded(kChunk);
  std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
  const double scale = std::ldexp(1.0, x + 1);
  for (std::uint64_t done = 0; done < samples;) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, samples - done));
    for (std::size_t i = 0; i < n; ++i) bits[i] = rng();
    kernels::bits_to_unit_significand(level, bits.data(), sig.data(), n);
    kernels::round_significand(level, sig.data(), rounded.data(), n, x);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (sig[i] - rounded[i]) / sig[i] * scale;
      int k = static_cast<int>((w + 1.0) / 2.0 * bins);
      k = std::clamp(k, 0, bins - 1);
      hist[static_cast<std::size_t>(k)] += 1.0;
    }
    done += n;
  }
  const double width = 2.0 / bins;
  for (double& h : hist) h /= static_cast<double>(samples) * width;
  return hist;
}

double speculation_factor(ArithOp op, Direction dir, int e_b) {
  if (e_b < 2) throw std::invalid_argument("speculation_factor: e_b must be >= 2");
  const double ln2 = std::log(2.0);
  const bool fwd = dir == Direction::forward;
  switch (op) {
    case ArithOp::add:
      return fwd ? 1.0 + std::ldexp(1.0, 2 - e_b) / ln2 : 1.0 - std::ldexp(1.0, 2 - e_b) / ln2;
    case ArithOp::sub:
      return fwd ? 1.0 - 1.0 / (std::ldexp(1.0, e_b - 2) * ln2 - ln2 / 2.0 - 0.25)
                 : 1.0 + 8.0 / (std::ldexp(1.0, e_b) * ln2 - 2.0 * ln2 - 5.0);
    case ArithOp::mul:
    case ArithOp::div:
      return 1.0;
    case ArithOp::sqrt:
      return fwd ? 4.0 : 0.25;
  }
  return 1.0;
}

int ops_per_bit(ArithOp op, int e_b, double eps) {
  double f = 0.0;
  if (op == ArithOp::add) {
    f = speculation_factor(ArithOp::add, Direction::forward, e_b);
  } else if (op == ArithOp::sub) {
    f = speculation_factor(ArithOp::sub, Direction::backward, e_b);
  } else {
    throw std::invalid_argument("ops_per_bit: only add and sub drift per operation");
  }
  return static_cast<int>(std::lround(std::log(eps * eps) / std::fabs(std::log(f))));
}

double input_error_variance(int x_in, const RoundingModel& model) {
  return rounding_variance(0.0, x_in, model, false);
}

FullPrecisionCheck check_full_precision(ArithOp op, double a, double b, double sigma,
                                        std::uint64_t samples, std::uint64_t seed,
                                        PerturbShape shape) {
  if (samples < 2) throw std::invalid_argument("check_full_precision: need >= 2 samples");
  const double s2 = sigma * sigma;
  FullPrecisionCheck out{op, a, b, 0.0, 0.0, 0.0, samples, seed};
  out.formula_variance = propagate_full_precision(op, a, b, s2, op == ArithOp::sqrt ? 0.0 : s2);

  double c0 = 0.0;
  switch (op) {
    case ArithOp::add: c0 = a + b; break;
    case ArithOp::sub: c0 = a - b; break;
    case ArithOp::mul: c0 = a * b; break;
    case ArithOp::div: c0 = a / b; break;
    case ArithOp::sqrt: c0 = std::sqrt(a); break;
  }

  const kernels::SimdLevel level = kernels::active_simd();
  std::mt19937_64 rng(seed);
  const double half = std::sqrt(3.0) * sigma;
  std::uniform_real_distribution<double> uni(-half, half);
  std::normal_distribution<double> gauss(0.0, sigma);
  auto draw = [&]() { return shape == PerturbShape::uniform ? uni(rng) : gauss(rng); };

  std::vector<double> da(kChunk);
  std::vector<double> db(kChunk);
  std::vector<double> rel(kChunk);
  kernels::MomentSums total;
  for (std::uint64_t done = 0; done < samples;) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, samples - done));
    for (std::size_t i = 0; i < n; ++i) {
      da[i] = draw();
      db[i] = op == ArithOp::sqrt ? 0.0 : draw();
    }
    kernels::relative_error_batch(level, op, a, b, da.data(), db.data(), c0, rel.data(), n);
    const kernels::MomentSums s = kernels::sums(level, rel.data(), n);
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
    done += n;
  }
  const double N = static_cast<double>(samples);
  const double mean = total.sum / N;
  out.empirical_variance = (total.sum_sq - N * mean * mean) / (N - 1.0);
  out.rel_dev = std::fabs(out.empirical_variance - out.formula_variance) / out.formula_variance;
  return out;
}

}  // namespace varprec
