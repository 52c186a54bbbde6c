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

#include <unistd.h>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "attrikit/mock_backends.hpp"
#include "attrikit/synthetic.hpp"

namespace testing_support {

struct Harness {
  std::vector<attrikit::SyntheticScene> scenes;
  std::shared_ptr<attrikit::SceneCatalog> catalog;
  std::vector<attrikit::Image> images;
  attrikit::Dataset truth;

  explicit Harness(std::uint64_t seed = 7, int count = 20, int objects = 15,
                   attrikit::DensityProfile density = attrikit::DensityProfile::sparse) {
    attrikit::SynthSpec spec;
    spec.seed = seed;
    spec.count = count;
    spec.objects_per_scene = objects;
    spec.density = density;
    scenes = attrikit::generate_scenes(spec);
    catalog = std::make_shared<attrikit::SceneCatalog>();
    for (const auto& s : scenes) {
      catalog->add(s);
      images.push_back({s.name, s.raster});
    }
    truth = attrikit::scenes_to_dataset(scenes);
  }
};

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("attrikit_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
