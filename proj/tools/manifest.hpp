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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace varprec::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Records a command run. No timestamps or host data, so identical runs
/// produce identical manifests.
class RunManifest {
 public:
  RunManifest(std::string command, std::uint64_t seed);

  void param(const std::string& key, nlohmann::json value) { params_[key] = std::move(value); }
  void flag(const std::string& note) { flags_.push_back(note); }
  /// Hashes `path` and lists it under its file name.
  void output(const std::filesystem::path& path);

  nlohmann::json to_json() const;
  /// Writes <dir>/<command>.manifest.json and returns its path.
  std::filesystem::path write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  std::uint64_t seed_;
  nlohmann::json params_ = nlohmann::json::object();
  nlohmann::json outputs_ = nlohmann::json::object();
  nlohmann::json flags_ = nlohmann::json::array();
};

}  // namespace varprec::cli
