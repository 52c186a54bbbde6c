// Copyright 2026 The AttriKit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

#include "json.hpp"

namespace attrikit {

using Json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
/// Writes through a sibling temporary and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Rounds to 9 significant digits. Idempotent.
double canonical_number(double value);
/// Sorted keys, canonical numbers, two-space indent, trailing newline.
std::string dump_canonical(const Json& value);
/// Same number and key rules on a single line, no trailing newline.
std::string dump_canonical_line(const Json& value);
Json parse_json(const std::string& text, const std::string& origin);
Json read_json(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t mix64(std::uint64_t x);

/// mt19937_64 with distribution mappings pinned here so that draws do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace attrikit
