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

// Self-trained knowledge distillation. Round 0 holds the teacher's pseudo
// labels; each later round trains a fresh student on the previous round's
// labels with
//
//   L = L_det + alpha * L_kd,   L_kd = mean_i |E_teacher(x)_i - E_student(x)_i|
//
// and relabels the training images with the student's filtered predictions.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attrikit/backends.hpp"
#include "attrikit/labels.hpp"
#include "attrikit/metrics.hpp"

namespace attrikit {

inline constexpr double kDefaultAlpha = 1.0;
inline constexpr int kDefaultRounds = 4;

/// L1 distance between the two feature vectors, averaged over elements
/// (mean) or summed. Throws ValidationError on a dimension mismatch.
double kd_loss(const FeaturePair& pair, KdReduction reduction = KdReduction::mean);

/// l_det + alpha * l_kd. Inputs must be finite and non-negative.
double composite_loss(double l_det, double l_kd, double alpha);

enum class StopRule { fixed_rounds, early_stop_on_val };

const char* to_string(StopRule rule);
StopRule stop_rule_from_string(const std::string& s);

struct SkdConfig {
  double alpha = kDefaultAlpha;
  int rounds = kDefaultRounds;
  double score_threshold = kDefaultScoreThreshold;
  int cap = kDefaultPseudoLabelCap;
  StopRule stop_rule = StopRule::fixed_rounds;
  /// Rounds without a mAP improvement tolerated under early_stop_on_val.
  int patience = 1;
  KdReduction kd = KdReduction::mean;
  int max_dets = kDefaultMaxDets;

  void validate() const;
};

struct LossRecord {
  int step = 0;
  double l_det = 0.0;
  double l_kd = 0.0;
  double composite = 0.0;

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

struct RoundRecord {
  int round_index = 0;
  PseudoLabelSet pseudo_labels;
  std::optional<DetectionMetrics> metrics;
  std::optional<double> miou_nearest;
  /// Losses of the training run that produced these labels (empty for round 0).
  std::vector<LossRecord> train_report;
  std::string job_id;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

/// Losses from a backend's step reports. Feature pairs take precedence over a
/// reported l_kd; a step with neither is a TrainingError.
std::vector<LossRecord> loss_report(const std::vector<TrainStep>& steps, const SkdConfig& cfg);

/// Round 0 record for teacher labels, evaluated against `truth` if given.
RoundRecord seed_round(PseudoLabelSet labels, const SkdConfig& cfg,
                       const Dataset* truth = nullptr);

/// Trains on state.pseudo_labels and relabels its images. `images` must hold
/// a raster for every image of the pseudo label set.
RoundRecord run_round(const RoundRecord& state, DetectorTrainBackend& backend,
                      const SkdConfig& cfg, std::span<const Image> images,
                      const Dataset* truth = nullptr, const std::string& dataset_uri = "");

/// Directory-per-round persistence:
///   <root>/round_<r>/{round.json, pseudo_labels.json, metrics.json, train_report.jsonl}
/// Each round directory is written beside the target and renamed into place.
class RoundStore {
 public:
  explicit RoundStore(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path round_dir(int round_index) const;
  std::filesystem::path pseudo_labels_path(int round_index) const;

  void save(const RoundRecord& record) const;
  RoundRecord load(int round_index) const;
  /// Rounds 0, 1, ... up to the first missing directory.
  std::vector<RoundRecord> load_all() const;

 private:
  std::filesystem::path root_;
};

/// Runs rounds after the last entry of `history` until cfg.rounds is reached
/// or the stop rule fires. New records are appended to `history` and saved to
/// `store` as they complete. Failures are rethrown as RoundError.
void continue_schedule(std::vector<RoundRecord>& history, DetectorTrainBackend* backend,
                       const SkdConfig& cfg, std::span<const Image> images,
                       const Dataset* truth = nullptr, const RoundStore* store = nullptr);

/// Round 0 from `seed_labels`, then continue_schedule. Without a backend only
/// round 0 is produced.
std::vector<RoundRecord> run_schedule(PseudoLabelSet seed_labels, DetectorTrainBackend* backend,
                                      const SkdConfig& cfg, std::span<const Image> images,
                                      const Dataset* truth = nullptr,
                                      const RoundStore* store = nullptr);

Json to_json(const LossRecord& r);

}  // namespace attrikit
