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
#include "attrikit/backends.hpp"

#include "attrikit/error.hpp"
#include "attrikit/parallel.hpp"

namespace attrikit {

const char* kd_contract_name(KdReduction r) {
  return r == KdReduction::mean ? "l1_mean" : "l1_sum";
}

KdReduction kd_contract_from_name(const std::string& name) {
  if (name == "l1_mean") return KdReduction::mean;
  if (name == "l1_sum") return KdReduction::sum;
  throw ConfigError("unknown distillation contract '" + name + "'");
}

Image DirectoryImageProvider::load(const AnnotatedImage& entry) const {
  return Image{entry.file_name, read_ppm(root_ / entry.file_name)};
}

void InMemoryImageProvider::add(std::string name, Raster raster) {
  rasters_[std::move(name)] = std::move(raster);
}

Image InMemoryImageProvider::load(const AnnotatedImage& entry) const {
  auto it = rasters_.find(entry.file_name);
  if (it == rasters_.end()) {
    throw ValidationError("no raster registered for " + entry.file_name);
  }
  return Image{entry.file_name, it->second};
}

std::vector<Image> load_images(const Dataset& dataset, const ImageProvider& provider) {
  return parallel_map(dataset.images.size(), [&](std::size_t i) {
    return provider.load(dataset.images[i]);
  });
}

std::string color_question(std::string_view noun) {
  return "what is the color of the " + std::string(noun);
}

std::string shape_question(std::string_view noun) {
  return "what is the shape of the " + std::string(noun);
}

std::string synonym_query(std::string_view word) {
  return "give the synonyms of " + std::string(word) +
         ", which can be used to describe the nuclei in a H&E stained "
         "pathological image";
}

std::string degree_query(std::string_view word) {
  return "give the words describing different degrees of " + std::string(word);
}

}  // namespace attrikit
