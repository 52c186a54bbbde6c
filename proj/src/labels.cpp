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
#include "attrikit/labels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "attrikit/error.hpp"

namespace attrikit {

const AnnotatedImage* Dataset::find(std::int64_t id) const {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

std::size_t Dataset::box_count() const {
  std::size_t n = 0;
  for (const auto& img : images) n += img.boxes.size();
  return n;
}

void Dataset::validate() const {
  std::set<std::int64_t> seen;
  for (const auto& img : images) {
    if (!seen.insert(img.id).second) {
      throw ValidationError("duplicate image id " + std::to_string(img.id));
    }
    img.size.validate();
    for (const auto& b : img.boxes) b.validate();
  }
}

const char* to_string(LabelSource source) {
  return source == LabelSource::teacher ? "teacher" : "student";
}

LabelSource label_source_from_string(const std::string& s) {
  if (s == "teacher") return LabelSource::teacher;
  if (s == "student") return LabelSource::student;
  throw ParseError("unknown label source '" + s + "'");
}

void PseudoLabelSet::validate(int cap) const {
  data.validate();
  if (round_index < 0) throw ValidationError("negative round index");
  if ((round_index == 0) != (source == LabelSource::teacher)) {
    throw ValidationError("round 0 labels must come from the teacher and only round 0");
  }
  for (const auto& img : data.images) {
    if (static_cast<int>(img.boxes.size()) > cap) {
      throw ValidationError("image " + std::to_string(img.id) + " holds " +
                            std::to_string(img.boxes.size()) +
                            " pseudo labels, cap is " + std::to_string(cap));
    }
  }
}

std::vector<Box> filter_and_cap(std::span<const Box> detections,
                                double score_threshold, int cap) {
  if (cap < 1) throw ValidationError("pseudo label cap must be >= 1");
  std::vector<Box> kept;
  for (const auto& b : detections) {
    if (b.score.value_or(1.0) >= score_threshold) kept.push_back(b);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Box& l, const Box& r) {
    return l.score.value_or(1.0) > r.score.value_or(1.0);
  });
  if (kept.size() > static_cast<std::size_t>(cap)) kept.resize(cap);
  return kept;
}

// --- COCO --------------------------------------------------------------------

namespace {

constexpr int kCategoryId = 1;
constexpr const char* kCategoryName = "nucleus";

template <typename T>
T require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError(where + ": field '" + key + "' has the wrong type");
  }
}

Box parse_bbox(const Json& ann, const std::string& where) {
  const auto bbox = require<std::vector<double>>(ann, "bbox", where);
  if (bbox.size() != 4) throw ParseError(where + ": bbox needs 4 numbers");
  if (bbox[2] < 0 || bbox[3] < 0) throw ParseError(where + ": negative bbox size");
  Box b = Box::from_xywh(bbox[0], bbox[1], bbox[2], bbox[3]);
  if (ann.contains("score")) {
    b.score = require<double>(ann, "score", where);
  }
  if (!b.valid()) throw ParseError(where + ": invalid box or score");
  return b;
}

}  // namespace

Dataset parse_coco(const Json& doc, const std::string& origin) {
  if (!doc.is_object()) throw ParseError(origin + ": top level must be an object");
  if (!doc.contains("images") || !doc["images"].is_array()) {
    throw ParseError(origin + ": missing 'images' array");
  }
  Dataset out;
  std::map<std::int64_t, std::size_t> index;
  const auto& images = doc["images"];
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = origin + ": images[" + std::to_string(i) + "]";
    const Json& rec = images[i];
    AnnotatedImage img;
    img.id = require<std::int64_t>(rec, "id", where);
    img.file_name = require<std::string>(rec, "file_name", where);
    img.size.width = require<int>(rec, "width", where);
    img.size.height = require<int>(rec, "height", where);
    if (!img.size.valid()) throw ParseError(where + ": non-positive size");
    if (rec.contains("tile_origin")) {
      const auto& t = rec["tile_origin"];
      img.tile_origin = TileOrigin{require<std::int64_t>(t, "parent_id", where),
                                   require<int>(t, "x", where),
                                   require<int>(t, "y", where)};
    }
    if (!index.emplace(img.id, out.images.size()).second) {
      throw ParseError(where + ": duplicate image id " + std::to_string(img.id));
    }
    out.images.push_back(std::move(img));
  }
  if (doc.contains("annotations")) {
    const auto& anns = doc["annotations"];
    if (!anns.is_array()) throw ParseError(origin + ": 'annotations' must be an array");
    for (std::size_t i = 0; i < anns.size(); ++i) {
      const std::string where = origin + ": annotations[" + std::to_string(i) + "]";
      const auto image_id = require<std::int64_t>(anns[i], "image_id", where);
      auto it = index.find(image_id);
      if (it == index.end()) {
        throw ParseError(where + ": unknown image_id " + std::to_string(image_id));
      }
      out.images[it->second].boxes.push_back(parse_bbox(anns[i], where));
    }
  }
  return out;
}

Json to_coco_json(const Dataset& dataset) {
  Json images = Json::array();
  Json anns = Json::array();
  std::int64_t ann_id = 1;
  for (const auto& img : dataset.images) {
    Json rec = {{"id", img.id},
                {"file_name", img.file_name},
                {"width", img.size.width},
                {"height", img.size.height}};
    if (img.tile_origin) {
      rec["tile_origin"] = {{"parent_id", img.tile_origin->parent_id},
                            {"x", img.tile_origin->x},
                            {"y", img.tile_origin->y}};
    }
    images.push_back(std::move(rec));
    for (const auto& b : img.boxes) {
      // Area from the emitted width and height, so a reload reproduces it.
      const double w = canonical_number(b.width());
      const double h = canonical_number(b.height());
      Json a = {{"id", ann_id++},
                {"image_id", img.id},
                {"category_id", kCategoryId},
                {"bbox", {b.x_min, b.y_min, w, h}},
                {"area", w * h},
                {"iscrowd", 0}};
      if (b.score) a["score"] = *b.score;
      anns.push_back(std::move(a));
    }
  }
  return {{"images", std::move(images)},
          {"annotations", std::move(anns)},
          {"categories", Json::array({{{"id", kCategoryId}, {"name", kCategoryName}}})}};
}

std::string serialize_coco(const Dataset& dataset) {
  return dump_canonical(to_coco_json(dataset));
}

Dataset load_coco(const std::filesystem::path& path) {
  return parse_coco(read_json(path), path.string());
}

void save_coco(const Dataset& dataset, const std::filesystem::path& path) {
  write_file(path, serialize_coco(dataset));
}

Dataset load_coco_results(const std::filesystem::path& path,
                          const Dataset& reference) {
  const Json doc = read_json(path);
  const std::string origin = path.string();
  if (!doc.is_array()) throw ParseError(origin + ": results must be a JSON array");
  Dataset out = reference;
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < out.images.size(); ++i) {
    out.images[i].boxes.clear();
    index[out.images[i].id] = i;
  }
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = origin + "[" + std::to_string(i) + "]";
    const auto image_id = require<std::int64_t>(doc[i], "image_id", where);
    auto it = index.find(image_id);
    if (it == index.end()) {
      throw ParseError(where + ": unknown image_id " + std::to_string(image_id));
    }
    out.images[it->second].boxes.push_back(parse_bbox(doc[i], where));
  }
  return out;
}

// --- tiling ------------------------------------------------------------------

namespace {

// Evenly spaced origins so the first tile starts at 0 and the last ends at
// the image edge.
int grid_origin(int index, int count, int extent, int tile) {
  if (count == 1) return (extent - tile) / 2;
  const int span = extent - tile;
  return (index * span + (count - 1) / 2) / (count - 1);
}

std::string tile_file_name(const std::string& parent, int k) {
  const std::filesystem::path p(parent);
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "_tile%02d", k);
  auto name = p.stem().string() + suffix + p.extension().string();
  return p.has_parent_path() ? (p.parent_path() / name).string() : name;
}

}  // namespace

Dataset tile_dataset(const Dataset& dataset, const TileSpec& spec) {
  spec.tile.validate();
  spec.crop.validate();
  if (spec.tiles_per_image < 1) throw ValidationError("tiles_per_image must be >= 1");
  if (spec.crop.width > spec.tile.width || spec.crop.height > spec.tile.height) {
    throw ValidationError("crop larger than tile");
  }
  const int cols = static_cast<int>(std::ceil(std::sqrt(spec.tiles_per_image)));
  const int rows = (spec.tiles_per_image + cols - 1) / cols;

  Dataset out;
  std::int64_t next_id = 1;
  for (const auto& img : dataset.images) {
    if (spec.tile.width > img.size.width || spec.tile.height > img.size.height) {
      throw ValidationError("tile " + std::to_string(spec.tile.width) + "x" +
                            std::to_string(spec.tile.height) +
                            " larger than image " + std::to_string(img.id));
    }
    for (int k = 0; k < spec.tiles_per_image; ++k) {
      const int row = k / cols;
      const int col = k % cols;
      const int tx = grid_origin(col, cols, img.size.width, spec.tile.width);
      const int ty = grid_origin(row, rows, img.size.height, spec.tile.height);

      Rng rng(mix64(spec.seed ^ mix64(static_cast<std::uint64_t>(img.id)) ^
                    mix64(static_cast<std::uint64_t>(k) + 1)));
      const int ox = tx + static_cast<int>(rng.uniform_int(0, spec.tile.width - spec.crop.width));
      const int oy = ty + static_cast<int>(rng.uniform_int(0, spec.tile.height - spec.crop.height));

      AnnotatedImage tile;
      tile.id = next_id++;
      tile.file_name = tile_file_name(img.file_name, k);
      tile.size = spec.crop;
      tile.tile_origin = TileOrigin{img.id, ox, oy};
      for (const auto& b : img.boxes) {
        Box shifted = b;
        shifted.x_min -= ox;
        shifted.x_max -= ox;
        shifted.y_min -= oy;
        shifted.y_max -= oy;
        auto clipped = clip_to_image(shifted, spec.crop);
        if (clipped && clipped->area() >= spec.min_visible_area) {
          tile.boxes.push_back(*clipped);
        }
      }
      out.images.push_back(std::move(tile));
    }
  }
  return out;
}

Raster crop_tile(const Raster& parent, const AnnotatedImage& tile) {
  if (!tile.tile_origin) throw ValidationError("image is not a tile");
  const auto& o = *tile.tile_origin;
  return parent.crop(Box{static_cast<double>(o.x), static_cast<double>(o.y),
                         static_cast<double>(o.x + tile.size.width),
                         static_cast<double>(o.y + tile.size.height)});
}

// --- diagnostics -------------------------------------------------------------

double miou_nearest(const Dataset& pseudo, const Dataset& truth) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& img : pseudo.images) {
    const AnnotatedImage* ref = truth.find(img.id);
    if (ref == nullptr) {
      throw ValidationError("pseudo image " + std::to_string(img.id) +
                            " has no ground-truth counterpart");
    }
    for (const auto& p : img.boxes) {
      double best = 0.0;
      for (const auto& t : ref->boxes) best = std::max(best, iou(p, t));
      sum += best;
      ++n;
    }
  }
  if (n == 0) throw ValidationError("miou_nearest of an empty pseudo label set");
  return sum / static_cast<double>(n);
}

double miou_nearest(const PseudoLabelSet& pseudo, const Dataset& truth) {
  return miou_nearest(pseudo.data, truth);
}

}  // namespace attrikit
