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

#include <string>
#include <string_view>
#include <vector>

#include "varprec/mimo.hpp"

namespace varprec::cli {

/// Parses a flat `key = value` sweep config. `#` starts a comment.
///
/// Keys: nt, k, snr_db, trials, seed, schemes, sweep_bits, ber_symbols,
/// match_tol_bits, threads. Unknown keys and malformed values throw
/// std::invalid_argument naming the line.
SimConfig parse_sim_config(std::string_view text);

/// Same as parse_sim_config on the file contents.
SimConfig load_sim_config(const std::string& path);

PlanKind parse_scheme(std::string_view name);
std::vector<PlanKind> parse_schemes(std::string_view list);
std::vector<double> parse_number_list(std::string_view list);

/// The flat key-value form of `cfg`, in a stable order.
std::vector<std::pair<std::string, std::string>> describe(const SimConfig& cfg);

}  // namespace varprec::cli
