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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attrikit/geometry.hpp"
#include "attrikit/raster.hpp"
#include "attrikit/util.hpp"

namespace attrikit {

inline constexpr double kDefaultScoreThreshold = 0.5;
inline constexpr int kDefaultPseudoLabelCap = 20;
/// Box fragments smaller than this (px^2) are dropped when tiling.
inline constexpr double kMinVisibleArea = 4.0;

/// Where a tiled image was cut from.
struct TileOrigin {
  std::int64_t parent_id = 0;
  int x = 0;
  int y = 0;

  friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

struct AnnotatedImage {
  std::int64_t id = 0;
  std::string file_name;
  ImageSize size;
  std::vector<Box> boxes;
  std::optional<TileOrigin> tile_origin;

  friend bool operator==(const AnnotatedImage&, const AnnotatedImage&) = default;
};

struct Dataset {
  std::vector<AnnotatedImage> images;

  const AnnotatedImage* find(std::int64_t id) const;
  std::size_t box_count() const;
  /// Unique ids, valid sizes and boxes.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class LabelSource { teacher, student };

const char* to_string(LabelSource source);
LabelSource label_source_from_string(const std::string& s);

/// Per-image pseudo labels for one self-training round. Round 0 always comes
/// from the teacher.
struct PseudoLabelSet {
  Dataset data;
  int round_index = 0;
  LabelSource source = LabelSource::teacher;

  void validate(int cap) const;

  friend bool operator==(const PseudoLabelSet&, const PseudoLabelSet&) = default;
};

/// Drops boxes scoring below `score_threshold`, then keeps the `cap`
/// highest-scoring ones ordered by descending score (stable on ties).
std::vector<Box> filter_and_cap(std::span<const Box> detections,
                                double score_threshold, int cap);

// COCO detection JSON. Boxes are stored as [x, y, w, h]; a "score" member on
// an annotation carries detection confidence the same way a results-array
// entry does.
Dataset parse_coco(const Json& doc, const std::string& origin);
Json to_coco_json(const Dataset& dataset);
std::string serialize_coco(const Dataset& dataset);
Dataset load_coco(const std::filesystem::path& path);
void save_coco(const Dataset& dataset, const std::filesystem::path& path);

/// Reads a COCO results array ([{image_id, bbox, score, ...}]) onto the
/// images of `reference`. Images without results get no boxes.
Dataset load_coco_results(const std::filesystem::path& path,
                          const Dataset& reference);

struct TileSpec {
  ImageSize tile{256, 256};
  int tiles_per_image = 16;
  ImageSize crop{224, 224};
  std::uint64_t seed = 0;
  double min_visible_area = kMinVisibleArea;
};

/// Cuts every image into an overlapped grid of tiles and takes one seeded
/// random crop per tile. Boxes are translated and clipped into the crop.
Dataset tile_dataset(const Dataset& dataset, const TileSpec& spec);

/// Pixels of a tile produced by tile_dataset, cut from its parent raster.
Raster crop_tile(const Raster& parent, const AnnotatedImage& tile);

/// Mean over all pseudo boxes of the best IoU against same-image truths.
double miou_nearest(const PseudoLabelSet& pseudo, const Dataset& truth);
double miou_nearest(const Dataset& pseudo, const Dataset& truth);

}  // namespace attrikit
