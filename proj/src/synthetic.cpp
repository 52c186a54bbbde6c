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
#include "attrikit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "attrikit/error.hpp"

namespace attrikit {

namespace {

constexpr Rgb kBackground{236, 192, 216};
constexpr int kBackgroundNoise = 10;
constexpr int kObjectNoise = 8;
constexpr int kPlacementAttempts = 1000;
constexpr double kSparseGap = 2.0;

Rgb color_for(const SceneObject& o) {
  for (const auto& d : o.degree_labels) {
    if (d == "dark purple") return {78, 38, 112};
    if (d == "rich purple") return {112, 52, 150};
    if (d == "vibrant purple") return {142, 72, 192};
  }
  return {112, 52, 150};
}

std::uint8_t jitter(std::uint8_t v, int delta) {
  return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + delta, 0, 255));
}

bool boxes_touch(const Box& a, const Box& b, double gap) {
  return a.x_min - gap < b.x_max && b.x_min - gap < a.x_max &&
         a.y_min - gap < b.y_max && b.y_min - gap < a.y_max;
}

}  // namespace

DensityProfile density_from_string(const std::string& s) {
  if (s == "sparse") return DensityProfile::sparse;
  if (s == "dense") return DensityProfile::dense;
  throw ConfigError("unknown density profile '" + s + "'");
}

const char* to_string(DensityProfile d) {
  return d == DensityProfile::sparse ? "sparse" : "dense";
}

std::vector<std::string> SceneObject::labels() const {
  std::vector<std::string> out{shape_label, color_label};
  out.insert(out.end(), degree_labels.begin(), degree_labels.end());
  return out;
}

std::vector<Box> SyntheticScene::truth_boxes() const {
  std::vector<Box> out;
  for (const auto& o : objects) out.push_back(o.box);
  return out;
}

std::string default_scene_name(std::uint64_t seed) {
  return "scene_" + std::to_string(seed) + ".ppm";
}

SyntheticScene generate_scene(std::uint64_t seed, int n_objects, ImageSize size,
                              DensityProfile density, double elongated_fraction) {
  if (n_objects < 1) throw ValidationError("a scene needs at least one object");
  if (!(elongated_fraction >= 0.0 && elongated_fraction <= 1.0)) {
    throw ValidationError("elongated fraction must be in [0, 1]");
  }
  size.validate();

  SyntheticScene scene;
  scene.name = default_scene_name(seed);
  scene.seed = seed;
  scene.size = size;
  scene.density = density;

  Rng rng(mix64(seed));
  for (int i = 0; i < n_objects; ++i) {
    SceneObject o;
    const bool elongated = rng.uniform() < elongated_fraction;
    const double radius = rng.uniform(6.0, 10.0);
    const double ratio = elongated ? rng.uniform(2.0, 2.8) : rng.uniform(1.0, 1.3);
    o.semi_major = radius * std::sqrt(ratio);
    o.semi_minor = radius / std::sqrt(ratio);
    o.angle = rng.uniform(0.0, std::numbers::pi);
    o.shape_label = elongated ? "elongated" : "round";
    o.color_label = "purple";
    if (!elongated) {
      o.degree_labels.push_back(ratio < 1.05   ? "mostly round"
                                : ratio < 1.12 ? "moderately round"
                                               : "slightly round");
    }
    const double shade = rng.uniform();
    o.degree_labels.push_back(shade < 0.55   ? "dark purple"
                              : shade < 0.85 ? "rich purple"
                                             : "vibrant purple");

    const double c = std::cos(o.angle), s = std::sin(o.angle);
    const double hw = std::sqrt(o.semi_major * o.semi_major * c * c +
                                o.semi_minor * o.semi_minor * s * s);
    const double hh = std::sqrt(o.semi_major * o.semi_major * s * s +
                                o.semi_minor * o.semi_minor * c * c);
    if (2.0 * hw + 2.0 > size.width || 2.0 * hh + 2.0 > size.height) {
      throw ValidationError("object " + std::to_string(i) + " does not fit in the image");
    }

    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      o.cx = rng.uniform(hw + 1.0, size.width - hw - 1.0);
      o.cy = rng.uniform(hh + 1.0, size.height - hh - 1.0);
      o.box = Box{o.cx - hw, o.cy - hh, o.cx + hw, o.cy + hh};
      placed = density == DensityProfile::dense ||
               std::none_of(scene.objects.begin(), scene.objects.end(),
                            [&](const SceneObject& other) {
                              return boxes_touch(o.box, other.box, kSparseGap);
                            });
    }
    if (!placed) {
      throw ValidationError("cannot place object " + std::to_string(i) + " of " +
                            std::to_string(n_objects) + " without overlap");
    }
    scene.objects.push_back(std::move(o));
  }
  scene.raster = render_scene(scene);
  return scene;
}

Raster render_scene(const SyntheticScene& scene) {
  Raster img(scene.size.width, scene.size.height);
  Rng rng(mix64(scene.seed ^ 0x5eed5eed5eedULL));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      img.set(x, y,
              {jitter(kBackground[0], static_cast<int>(rng.uniform_int(-kBackgroundNoise, kBackgroundNoise))),
               jitter(kBackground[1], static_cast<int>(rng.uniform_int(-kBackgroundNoise, kBackgroundNoise))),
               jitter(kBackground[2], static_cast<int>(rng.uniform_int(-kBackgroundNoise, kBackgroundNoise)))});
    }
  }
  for (const auto& o : scene.objects) {
    const Rgb base = color_for(o);
    const double c = std::cos(o.angle), s = std::sin(o.angle);
    const int x0 = std::max(0, static_cast<int>(std::floor(o.box.x_min)));
    const int y0 = std::max(0, static_cast<int>(std::floor(o.box.y_min)));
    const int x1 = std::min(img.width(), static_cast<int>(std::ceil(o.box.x_max)));
    const int y1 = std::min(img.height(), static_cast<int>(std::ceil(o.box.y_max)));
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double dx = x + 0.5 - o.cx, dy = y + 0.5 - o.cy;
        const double u = dx * c + dy * s;
        const double v = -dx * s + dy * c;
        if ((u * u) / (o.semi_major * o.semi_major) + (v * v) / (o.semi_minor * o.semi_minor) > 1.0) {
          continue;
        }
        img.set(x, y,
                {jitter(base[0], static_cast<int>(rng.uniform_int(-kObjectNoise, kObjectNoise))),
                 jitter(base[1], static_cast<int>(rng.uniform_int(-kObjectNoise, kObjectNoise))),
                 jitter(base[2], static_cast<int>(rng.uniform_int(-kObjectNoise, kObjectNoise)))});
      }
    }
  }
  return img;
}

void SceneCatalog::add(SyntheticScene scene) {
  auto name = scene.name;
  scenes_[name] = std::move(scene);
}

const SyntheticScene* SceneCatalog::find(const std::string& name) const {
  auto it = scenes_.find(name);
  return it == scenes_.end() ? nullptr : &it->second;
}

const SyntheticScene& SceneCatalog::at(const std::string& name) const {
  const auto* s = find(name);
  if (s == nullptr) throw ValidationError("no scene metadata for image " + name);
  return *s;
}

Json SceneCatalog::to_json() const {
  Json scenes = Json::array();
  for (const auto& [name, sc] : scenes_) {
    Json objects = Json::array();
    for (const auto& o : sc.objects) {
      objects.push_back({{"box", {o.box.x_min, o.box.y_min, o.box.x_max, o.box.y_max}},
                         {"cx", o.cx},
                         {"cy", o.cy},
                         {"semi_major", o.semi_major},
                         {"semi_minor", o.semi_minor},
                         {"angle", o.angle},
                         {"shape", o.shape_label},
                         {"color", o.color_label},
                         {"degrees", o.degree_labels}});
    }
    scenes.push_back({{"name", name},
                      {"seed", sc.seed},
                      {"width", sc.size.width},
                      {"height", sc.size.height},
                      {"density", to_string(sc.density)},
                      {"objects", objects}});
  }
  return {{"scenes", scenes}};
}

SceneCatalog SceneCatalog::from_json(const Json& j) {
  SceneCatalog cat;
  try {
    for (const auto& s : j.at("scenes")) {
      SyntheticScene sc;
      sc.name = s.at("name").get<std::string>();
      sc.seed = s.at("seed").get<std::uint64_t>();
      sc.size = {s.at("width").get<int>(), s.at("height").get<int>()};
      sc.density = density_from_string(s.at("density").get<std::string>());
      for (const auto& o : s.at("objects")) {
        SceneObject obj;
        const auto b = o.at("box").get<std::vector<double>>();
        if (b.size() != 4) throw ParseError("scene box needs 4 numbers");
        obj.box = Box{b[0], b[1], b[2], b[3]};
        obj.cx = o.at("cx").get<double>();
        obj.cy = o.at("cy").get<double>();
        obj.semi_major = o.at("semi_major").get<double>();
        obj.semi_minor = o.at("semi_minor").get<double>();
        obj.angle = o.at("angle").get<double>();
        obj.shape_label = o.at("shape").get<std::string>();
        obj.color_label = o.at("color").get<std::string>();
        obj.degree_labels = o.at("degrees").get<std::vector<std::string>>();
        sc.objects.push_back(std::move(obj));
      }
      cat.add(std::move(sc));
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("scene catalog: ") + e.what());
  }
  return cat;
}

Dataset scenes_to_dataset(const std::vector<SyntheticScene>& scenes) {
  Dataset ds;
  std::int64_t id = 1;
  for (const auto& sc : scenes) {
    ds.images.push_back(AnnotatedImage{id++, sc.name, sc.size, sc.truth_boxes(), std::nullopt});
  }
  return ds;
}

std::vector<SyntheticScene> generate_scenes(const SynthSpec& spec) {
  if (spec.count < 1) throw ValidationError("synthetic dataset needs count >= 1");
  std::vector<SyntheticScene> out;
  for (int k = 0; k < spec.count; ++k) {
    auto sc = generate_scene(spec.seed * 1000003ULL + static_cast<std::uint64_t>(k),
                             spec.objects_per_scene, spec.size, spec.density,
                             spec.elongated_fraction);
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d.ppm", k);
    sc.name = name;
    out.push_back(std::move(sc));
  }
  return out;
}

void write_synthetic_dataset(const std::vector<SyntheticScene>& scenes,
                             const std::filesystem::path& root) {
  SceneCatalog cat;
  for (const auto& sc : scenes) {
    write_ppm(root / "images" / sc.name, sc.raster);
    cat.add(sc);
  }
  save_coco(scenes_to_dataset(scenes), root / "annotations.json");
  write_file(root / "scenes.json", dump_canonical(cat.to_json()));
}

}  // namespace attrikit
