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

// The attrikit command line: synth, prompt, detect, distill, eval.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attrikit/error.hpp"
#include "attrikit/prompt.hpp"
#include "attrikit/remote_backend.hpp"
#include "attrikit/skd.hpp"

namespace attrikit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBackend = 3;
inline constexpr int kExitData = 4;

int exit_code_for(ErrorCategory category);

/// Settings for one command. Loaded from an optional JSON file, then
/// overridden by flags.
struct RunConfig {
  std::string backend = "mock";
  EndpointConfig endpoint;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";

  /// Dataset directory holding annotations.json, images/ and (for the mock
  /// backends) scenes.json. The three paths can also be set individually.
  std::filesystem::path dataset;
  std::filesystem::path annotations;
  std::filesystem::path images;
  std::filesystem::path scenes;

  // prompt
  std::vector<std::string> nouns{kDefaultNoun};
  int top_k = kDefaultAttributeTopK;
  int top_n = kDefaultTopN;
  AblationMode ablation = AblationMode::full;
  AugmentOptions augment;
  /// Replaces generated attributes when set.
  std::optional<AttributeLexicon> lexicon;

  // detect / distill
  std::filesystem::path prompts;
  std::filesystem::path pseudo;
  bool overlays = true;
  SkdConfig skd;
  bool resume = false;

  // eval
  std::filesystem::path preds;
  std::filesystem::path truth;

  // synth
  int count = 20;
  ImageSize size{224, 224};
  std::string density = "sparse";
  int objects = 15;

  /// Fills empty annotations/images/scenes paths from `dataset`.
  void resolve_paths();
};

/// Applies the keys of a JSON config object. Unknown keys are a ConfigError.
void apply_config_json(RunConfig& cfg, const Json& j);

/// Runs the command line. Diagnostics go to `err`, tables to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace attrikit
