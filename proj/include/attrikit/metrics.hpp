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

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "attrikit/geometry.hpp"
#include "attrikit/labels.hpp"
#include "attrikit/util.hpp"

namespace attrikit {

inline constexpr int kDefaultMaxDets = 100;
inline constexpr int kRecallPoints = 101;

/// IoU thresholds 0.50, 0.55, ..., 0.95, each computed as an exact decimal
/// quotient so that e.g. an IoU of exactly 0.8 passes the 0.80 threshold.
std::array<double, 10> coco_iou_thresholds();

/// Result of matching one image's predictions against its truths.
struct Matching {
  /// Prediction indices in the order they were matched (score descending,
  /// ties by input index).
  std::vector<std::size_t> order;
  /// For each prediction (input index), the matched truth index.
  std::vector<std::optional<std::size_t>> pred_to_truth;

  std::size_t true_positives() const;
};

/// Greedy one-to-one matching: each prediction in score order takes the
/// unmatched truth with the highest IoU >= threshold (lowest index on ties).
Matching match_greedy(std::span<const Box> preds, std::span<const Box> truths,
                      double iou_threshold);

/// One scored decision in the pooled precision/recall computation.
struct ScoredMatch {
  double score = 0.0;
  bool true_positive = false;
};

struct ApResult {
  double ap = 0.0;
  double recall = 0.0;
  /// Set when there were no truths; AP and recall are then reported as 0.
  bool no_truth = false;
};

/// COCO 101-point interpolated AP. Predictions that share a score are treated
/// as one operating point, so the result does not depend on their order.
ApResult average_precision(std::span<const ScoredMatch> matches,
                           std::size_t n_truth);

struct ThresholdResult {
  double threshold = 0.0;
  double ap = 0.0;
  double recall = 0.0;

  friend bool operator==(const ThresholdResult&, const ThresholdResult&) = default;
};

struct DetectionMetrics {
  double map = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  double ar = 0.0;
  std::vector<ThresholdResult> per_threshold;
  bool no_truth = false;

  friend bool operator==(const DetectionMetrics&, const DetectionMetrics&) = default;
};

/// Class-agnostic COCO box evaluation. Every image of `preds` must exist in
/// `truth`; truth images absent from `preds` count as having no predictions.
DetectionMetrics evaluate(const Dataset& preds, const Dataset& truth,
                          int max_dets = kDefaultMaxDets);

Json to_json(const DetectionMetrics& m);
DetectionMetrics metrics_from_json(const Json& j);

}  // namespace attrikit
