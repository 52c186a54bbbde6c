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

// Deterministic stand-ins for the four model backends, operating on
// synthetic scenes. They are simulations: the numbers they produce are
// shaped so that prompt granularity, prompt order and self-training have
// measurable effects, not to imitate any particular model.
//
// Grounding model, per object with labels L (shape, color, degrees):
//   q        = mean over L of max_{r : prompt r mentions l} 0.9^r
//   recall   : detected iff u < 0.55 + 0.4 q
//   jitter   : each corner moves by d * (0.02 + 0.13 (1 - q)) * box extent
//   score    = 0.3 + 0.6 q + 0.1 (u_s - 0.5)
// plus round(0.25 n (1 - mean q)) low-scoring background boxes. The random
// draws (u, d, u_s) depend only on the scene, so runs with different
// prompts are paired.

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "attrikit/backends.hpp"
#include "attrikit/synthetic.hpp"

namespace attrikit {

inline constexpr std::size_t kMockEmbeddingDim = 16;
inline constexpr double kPromptOrderDecay = 0.9;

/// Unit vector derived from a hash of `key`.
EmbeddingVector hash_unit_vector(std::string_view key, std::size_t dim = kMockEmbeddingDim);

/// Concepts mentioned by one prompt. Aliases are folded ("circular" ->
/// "round", "violet" -> "purple") and a degree modifier followed by an
/// attribute yields both "modifier base" and "base".
std::vector<std::string> prompt_concepts(std::string_view prompt);

class MockGroundedDetector : public GroundedDetectorBackend {
 public:
  explicit MockGroundedDetector(std::shared_ptr<const SceneCatalog> catalog);

  GroundingResult ground(std::span<const std::string> prompts, const Image& image,
                         bool want_embeddings = true) const override;

  /// Per-object prompt quality q in [0, 1].
  std::vector<double> prompt_quality(std::span<const std::string> prompts,
                                     const SyntheticScene& scene) const;
  EmbeddingVector prompt_embedding(std::span<const std::string> prompts) const;
  EmbeddingVector object_embedding(const SyntheticScene& scene, std::size_t index) const;

 private:
  std::shared_ptr<const SceneCatalog> catalog_;
};

/// Answers color questions with the dominant hue bucket of dark pixels and
/// shape questions with "round"/"elongated" from the eccentricity of the
/// largest dark blob.
class MockVqa : public CaptionVqaBackend {
 public:
  std::string answer(const Raster& patch, std::string_view question) const override;

  static constexpr double kElongatedEccentricity = 0.8;
};

/// Fixed synonym/degree dictionary.
class MockLanguage : public LanguageBackend {
 public:
  std::vector<std::string> word_list(std::string_view query) const override;

  static const std::map<std::string, std::vector<std::string>>& synonyms();
  static const std::map<std::string, std::vector<std::string>>& degrees();
};

/// Moves every pseudo box `factor` of the way toward its best-overlapping
/// truth box. Boxes overlapping no truth are kept as they are. If any pseudo
/// box exists and some truth box was not covered, the first uncovered truth
/// is added with the mean pseudo score.
std::vector<Box> refine_toward_truth(std::span<const Box> pseudo,
                                     std::span<const Box> truth, double factor);

/// Student whose "training" is refine_toward_truth against scene metadata.
class MockStudent : public DetectorTrainBackend {
 public:
  static constexpr double kLearningFactor = 0.5;
  static constexpr int kEpochs = 5;

  explicit MockStudent(std::shared_ptr<const SceneCatalog> catalog);

  TrainResult train(const TrainRequest& request) override;
  std::vector<Box> predict(const std::string& job_id, const Image& image) override;

 private:
  std::shared_ptr<const SceneCatalog> catalog_;
  std::mutex mu_;
  std::map<std::string, std::map<std::string, std::vector<Box>>> jobs_;
};

}  // namespace attrikit
