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

// Seeded stand-in for stained tissue patches: filled ellipses in shades of
// purple on a pink, noisy background. Each object records the attribute
// labels a perfect prompt would use to describe it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "attrikit/geometry.hpp"
#include "attrikit/labels.hpp"
#include "attrikit/raster.hpp"
#include "attrikit/util.hpp"

namespace attrikit {

enum class DensityProfile { sparse, dense };

DensityProfile density_from_string(const std::string& s);
const char* to_string(DensityProfile d);

struct SceneObject {
  Box box;
  double cx = 0.0;
  double cy = 0.0;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;
  std::string shape_label;  // "round" | "elongated"
  std::string color_label;  // "purple"
  /// Graded labels, e.g. {"slightly round", "dark purple"}.
  std::vector<std::string> degree_labels;

  /// shape, color, then degree labels.
  std::vector<std::string> labels() const;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct SyntheticScene {
  std::string name;
  std::uint64_t seed = 0;
  ImageSize size;
  DensityProfile density = DensityProfile::sparse;
  std::vector<SceneObject> objects;
  Raster raster;

  std::vector<Box> truth_boxes() const;
};

std::string default_scene_name(std::uint64_t seed);

inline constexpr double kDefaultElongatedFraction = 0.2;

SyntheticScene generate_scene(std::uint64_t seed, int n_objects, ImageSize size,
                              DensityProfile density = DensityProfile::sparse,
                              double elongated_fraction = kDefaultElongatedFraction);

/// Deterministic rendering of the scene's objects; `generate_scene` fills
/// `raster` with this.
Raster render_scene(const SyntheticScene& scene);

/// Scene metadata keyed by image name, shared by the mock backends.
class SceneCatalog {
 public:
  void add(SyntheticScene scene);
  const SyntheticScene* find(const std::string& name) const;
  const SyntheticScene& at(const std::string& name) const;
  std::size_t size() const { return scenes_.size(); }
  const std::map<std::string, SyntheticScene>& scenes() const { return scenes_; }

  /// Metadata only; rasters are not stored.
  Json to_json() const;
  static SceneCatalog from_json(const Json& j);

 private:
  std::map<std::string, SyntheticScene> scenes_;
};

/// COCO truth for a list of scenes, ids 1..n in order.
Dataset scenes_to_dataset(const std::vector<SyntheticScene>& scenes);

struct SynthSpec {
  std::uint64_t seed = 0;
  int count = 20;
  ImageSize size{224, 224};
  DensityProfile density = DensityProfile::sparse;
  int objects_per_scene = 15;
  double elongated_fraction = kDefaultElongatedFraction;
};

std::vector<SyntheticScene> generate_scenes(const SynthSpec& spec);

/// Writes annotations.json, scenes.json and images/<name>.ppm under `root`.
void write_synthetic_dataset(const std::vector<SyntheticScene>& scenes,
                             const std::filesystem::path& root);

}  // namespace attrikit
