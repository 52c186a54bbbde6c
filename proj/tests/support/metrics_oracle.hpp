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

// Brute-force COCO box evaluation used as a reference for evaluate(). It
// shares no code with the library: IoU, matching and the precision envelope
// are recomputed from scratch, and interpolated precision is found by
// scanning every operating point for each recall sample.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

struct Rect {
  double x1, y1, x2, y2;
  double score;
};

struct Img {
  std::vector<Rect> truth;
  std::vector<Rect> preds;
};

struct Result {
  double map = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  double ar = 0.0;
  std::vector<double> ap;
  std::vector<double> recall;
};

inline double overlap(const Rect& a, const Rect& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter;
  return uni <= 0 ? 0.0 : inter / uni;
}

inline Result evaluate(const std::vector<Img>& images, std::size_t max_dets = 100) {
  Result r;
  std::size_t n_truth = 0;
  for (const auto& im : images) n_truth += im.truth.size();

  for (int t = 0; t < 10; ++t) {
    const double thr = (50 + 5 * t) / 100.0;
    // (score, is_tp) over all images
    std::vector<std::pair<double, bool>> decisions;
    for (const auto& im : images) {
      std::vector<std::size_t> idx(im.preds.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return im.preds[a].score > im.preds[b].score;
      });
      if (idx.size() > max_dets) idx.resize(max_dets);
      std::vector<bool> used(im.truth.size(), false);
      for (std::size_t p : idx) {
        int best = -1;
        double best_iou = -1.0;
        for (std::size_t g = 0; g < im.truth.size(); ++g) {
          if (used[g]) continue;
          const double v = overlap(im.preds[p], im.truth[g]);
          if (v >= thr && v > best_iou) {
            best_iou = v;
            best = static_cast<int>(g);
          }
        }
        if (best >= 0) used[best] = true;
        decisions.emplace_back(im.preds[p].score, best >= 0);
      }
    }
    if (n_truth == 0) {
      r.ap.push_back(0.0);
      r.recall.push_back(0.0);
      continue;
    }
    // One operating point per distinct score: everything scoring >= s.
    std::map<double, std::pair<int, int>, std::greater<double>> at_score;
    for (auto [s, tp] : decisions) {
      auto& c = at_score[s];
      (tp ? c.first : c.second) += 1;
    }
    std::vector<std::pair<double, double>> points;  // (recall, precision)
    int tp = 0, fp = 0;
    for (const auto& [s, c] : at_score) {
      tp += c.first;
      fp += c.second;
      points.emplace_back(static_cast<double>(tp) / n_truth, static_cast<double>(tp) / (tp + fp));
    }
    double sum = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double rk = k / 100.0;
      double best = 0.0;
      for (auto [rec, prec] : points) {
        if (rec >= rk) best = std::max(best, prec);
      }
      sum += best;
    }
    r.ap.push_back(sum / 101.0);
    r.recall.push_back(static_cast<double>(tp) / n_truth);
  }
  r.map = std::accumulate(r.ap.begin(), r.ap.end(), 0.0) / 10.0;
  r.ap50 = r.ap[0];
  r.ap75 = r.ap[5];
  r.ar = std::accumulate(r.recall.begin(), r.recall.end(), 0.0) / 10.0;
  return r;
}

}  // namespace oracle
