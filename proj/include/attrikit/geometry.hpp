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

#include <optional>
#include <span>
#include <vector>

namespace attrikit {

/// Axis-aligned rectangle in continuous image coordinates. Ground-truth boxes
/// carry no score; detections and pseudo labels do.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  std::optional<double> score;

  static Box from_xywh(double x, double y, double w, double h,
                       std::optional<double> score = std::nullopt) {
    return Box{x, y, x + w, y + h, score};
  }

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }

  bool valid() const;
  /// Throws ValidationError when `valid()` is false.
  void validate() const;

  friend bool operator==(const Box&, const Box&) = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;

  bool valid() const { return width > 0 && height > 0; }
  void validate() const;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Intersection over union; 0 when the union is empty.
double iou(const Box& a, const Box& b);

/// Greedy non-maximum suppression. Output is sorted by descending score with
/// equal scores kept in input order.
std::vector<Box> nms(std::span<const Box> boxes, double iou_threshold);

/// Clamps `box` to the image rectangle. Throws EmptyRegionError when nothing
/// with positive area remains.
Box clip_and_crop_rect(const Box& box, ImageSize image);

/// Like clip_and_crop_rect but returns nullopt instead of throwing.
std::optional<Box> clip_to_image(const Box& box, ImageSize image);

}  // namespace attrikit
