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
#include "attrikit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "attrikit/error.hpp"

namespace attrikit {

namespace {

std::string describe(const Box& b) {
  std::ostringstream os;
  os << "(" << b.x_min << "," << b.y_min << "," << b.x_max << "," << b.y_max
     << ")";
  return os.str();
}

}  // namespace

bool Box::valid() const {
  if (!std::isfinite(x_min) || !std::isfinite(y_min) ||
      !std::isfinite(x_max) || !std::isfinite(y_max)) {
    return false;
  }
  if (x_min > x_max || y_min > y_max) return false;
  if (score && !(*score >= 0.0 && *score <= 1.0)) return false;
  return true;
}

void Box::validate() const {
  if (!valid()) {
    throw ValidationError("invalid box " + describe(*this));
  }
}

void ImageSize::validate() const {
  if (!valid()) {
    throw ValidationError("invalid image size " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

double iou(const Box& a, const Box& b) {
  a.validate();
  b.validate();
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

std::vector<Box> nms(std::span<const Box> boxes, double iou_threshold) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("nms threshold outside [0,1]");
  }
  for (const auto& b : boxes) {
    b.validate();
    if (!b.score) throw ValidationError("nms input box without score");
  }

  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return *boxes[l].score > *boxes[r].score;
  });

  std::vector<Box> kept;
  for (std::size_t idx : order) {
    const Box& cand = boxes[idx];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Box& k) {
      return iou(k, cand) > iou_threshold;
    });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

std::optional<Box> clip_to_image(const Box& box, ImageSize image) {
  image.validate();
  box.validate();
  Box out = box;
  out.x_min = std::clamp(box.x_min, 0.0, static_cast<double>(image.width));
  out.x_max = std::clamp(box.x_max, 0.0, static_cast<double>(image.width));
  out.y_min = std::clamp(box.y_min, 0.0, static_cast<double>(image.height));
  out.y_max = std::clamp(box.y_max, 0.0, static_cast<double>(image.height));
  if (out.x_max <= out.x_min || out.y_max <= out.y_min) return std::nullopt;
  return out;
}

Box clip_and_crop_rect(const Box& box, ImageSize image) {
  auto clipped = clip_to_image(box, image);
  if (!clipped) {
    throw EmptyRegionError("box " + describe(box) + " lies outside the " +
                           std::to_string(image.width) + "x" +
                           std::to_string(image.height) + " image");
  }
  return *clipped;
}

}  // namespace attrikit
