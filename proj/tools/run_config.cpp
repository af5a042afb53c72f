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


#include "run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace varprec::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_num(std::string_view v, const std::string& key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("bad value for " + key + ": '" + std::string(v) + "'");
  }
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%g", v[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

}  // namespace

PlanKind parse_scheme(std::string_view name) {
  for (PlanKind k : {PlanKind::fixed, PlanKind::offline, PlanKind::online, PlanKind::random_blockwise}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::vector<PlanKind> parse_schemes(std::string_view list) {
  std::vector<PlanKind> out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_scheme(trim(item)));
  }
  return out;
}

std::vector<double> parse_number_list(std::string_view list) {
  std::vector<double> out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string_view t = trim(item);
    if (!t.empty()) out.push_back(parse_num<double>(t, "list"));
  }
  return out;
}

SimConfig parse_sim_config(std::string_view text) {
  SimConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string_view::npos) throw std::invalid_argument("expected key = value");
      const std::string key(trim(line.substr(0, eq)));
      const std::string_view val = trim(line.substr(eq + 1));
      if (key == "nt") cfg.nt = parse_num<int>(val, key);
      else if (key == "k") cfg.k = parse_num<int>(val, key);
      else if (key == "snr_db") cfg.snr_db = parse_num<double>(val, key);
      else if (key == "trials") cfg.trials = parse_num<int>(val, key);
      else if (key == "seed") cfg.seed = parse_num<std::uint64_t>(val, key);
      else if (key == "schemes") cfg.schemes = parse_schemes(val);
      else if (key == "sweep_bits") cfg.sweep = parse_number_list(val);
      else if (key == "ber_symbols") cfg.ber_symbols = parse_num<std::uint64_t>(val, key);
      else if (key == "match_tol_bits") cfg.match_tol = parse_num<double>(val, key);
      else if (key == "threads") cfg.threads = parse_num<int>(val, key);
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sim_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> describe(const SimConfig& cfg) {
  std::string schemes;
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
    if (i) schemes += ',';
    schemes += to_string(cfg.schemes[i]);
  }
  char snr[32];
  std::snprintf(snr, sizeof snr, "%g", cfg.snr_db);
  char tol[32];
  std::snprintf(tol, sizeof tol, "%g", cfg.match_tol);
  return {{"nt", std::to_string(cfg.nt)},
          {"k", std::to_string(cfg.k)},
          {"snr_db", snr},
          {"trials", std::to_string(cfg.trials)},
          {"seed", std::to_string(cfg.seed)},
          {"schemes", schemes},
          {"sweep_bits", join_numbers(cfg.sweep)},
          {"ber_symbols", std::to_string(cfg.ber_symbols)},
          {"match_tol_bits", tol}};
}

}  // namespace varprec::cli
