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
#include "attrikit/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "attrikit/error.hpp"

namespace attrikit {

std::array<double, 10> coco_iou_thresholds() {
  std::array<double, 10> t{};
  for (int i = 0; i < 10; ++i) t[i] = static_cast<double>(50 + 5 * i) / 100.0;
  return t;
}

std::size_t Matching::true_positives() const {
  return static_cast<std::size_t>(
      std::count_if(pred_to_truth.begin(), pred_to_truth.end(),
                    [](const auto& m) { return m.has_value(); }));
}

namespace {

double score_of(const Box& b) { return b.score.value_or(1.0); }

std::vector<std::size_t> score_order(std::span<const Box> boxes) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return score_of(boxes[l]) > score_of(boxes[r]);
  });
  return order;
}

}  // namespace

Matching match_greedy(std::span<const Box> preds, std::span<const Box> truths,
                      double iou_threshold) {
  Matching m;
  m.order = score_order(preds);
  m.pred_to_truth.assign(preds.size(), std::nullopt);
  std::vector<bool> taken(truths.size(), false);
  for (std::size_t p : m.order) {
    double best = -1.0;
    std::optional<std::size_t> best_t;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (taken[t]) continue;
      const double v = iou(preds[p], truths[t]);
      if (v >= iou_threshold && v > best) {
        best = v;
        best_t = t;
      }
    }
    if (best_t) {
      taken[*best_t] = true;
      m.pred_to_truth[p] = best_t;
    }
  }
  return m;
}

ApResult average_precision(std::span<const ScoredMatch> matches,
                           std::size_t n_truth) {
  ApResult out;
  if (n_truth == 0) {
    out.no_truth = true;
    return out;
  }
  std::vector<ScoredMatch> sorted(matches.begin(), matches.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredMatch& l, const ScoredMatch& r) { return l.score > r.score; });

  // One operating point per distinct score.
  std::vector<double> recall;
  std::vector<double> precision;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      (sorted[j].true_positive ? tp : fp) += 1;
      ++j;
    }
    recall.push_back(static_cast<double>(tp) / static_cast<double>(n_truth));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    i = j;
  }
  for (std::size_t k = precision.size(); k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }

  double sum = 0.0;
  for (int r = 0; r < kRecallPoints; ++r) {
    const double level = static_cast<double>(r) / 100.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  out.ap = sum / kRecallPoints;
  out.recall = static_cast<double>(tp) / static_cast<double>(n_truth);
  return out;
}

DetectionMetrics evaluate(const Dataset& preds, const Dataset& truth,
                          int max_dets) {
  if (max_dets < 1) throw ValidationError("max_dets must be >= 1");
  truth.validate();
  preds.validate();
  for (const auto& img : preds.images) {
    if (truth.find(img.id) == nullptr) {
      throw ValidationError("prediction image " + std::to_string(img.id) +
                            " is not in the ground-truth set");
    }
  }

  // Top-scoring predictions per truth image, capped at max_dets.
  std::vector<std::vector<Box>> per_image(truth.images.size());
  for (std::size_t i = 0; i < truth.images.size(); ++i) {
    const AnnotatedImage* p = preds.find(truth.images[i].id);
    if (p == nullptr) continue;
    const auto order = score_order(p->boxes);
    const std::size_t keep = std::min<std::size_t>(order.size(), max_dets);
    for (std::size_t k = 0; k < keep; ++k) per_image[i].push_back(p->boxes[order[k]]);
  }

  const std::size_t n_truth = truth.box_count();
  DetectionMetrics m;
  m.no_truth = n_truth == 0;
  for (double thr : coco_iou_thresholds()) {
    std::vector<ScoredMatch> pooled;
    for (std::size_t i = 0; i < truth.images.size(); ++i) {
      const auto& dets = per_image[i];
      const Matching match = match_greedy(dets, truth.images[i].boxes, thr);
      for (std::size_t k = 0; k < dets.size(); ++k) {
        pooled.push_back({score_of(dets[k]), match.pred_to_truth[k].has_value()});
      }
    }
    const ApResult r = average_precision(pooled, n_truth);
    m.per_threshold.push_back({thr, r.ap, r.recall});
  }
  double ap_sum = 0.0;
  double rc_sum = 0.0;
  for (const auto& t : m.per_threshold) {
    ap_sum += t.ap;
    rc_sum += t.recall;
  }
  const double n = static_cast<double>(m.per_threshold.size());
  m.map = ap_sum / n;
  m.ar = rc_sum / n;
  m.ap50 = m.per_threshold[0].ap;
  m.ap75 = m.per_threshold[5].ap;
  return m;
}

Json to_json(const DetectionMetrics& m) {
  Json per = Json::array();
  for (const auto& t : m.per_threshold) {
    per.push_back({{"threshold", t.threshold}, {"ap", t.ap}, {"recall", t.recall}});
  }
  return {{"map", m.map},   {"ap50", m.ap50},         {"ap75", m.ap75},
          {"ar", m.ar},     {"per_threshold", per},   {"no_truth", m.no_truth}};
}

DetectionMetrics metrics_from_json(const Json& j) {
  try {
    DetectionMetrics m;
    m.map = j.at("map").get<double>();
    m.ap50 = j.at("ap50").get<double>();
    m.ap75 = j.at("ap75").get<double>();
    m.ar = j.at("ar").get<double>();
    m.no_truth = j.value("no_truth", false);
    for (const auto& t : j.at("per_threshold")) {
      m.per_threshold.push_back({t.at("threshold").get<double>(), t.at("ap").get<double>(),
                                 t.at("recall").get<double>()});
    }
    return m;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("metrics report: ") + e.what());
  }
}

}  // namespace attrikit
