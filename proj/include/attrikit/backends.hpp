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

// Every model touchpoint goes through one of the four interfaces below.
// Implementations must be callable from several threads at once.

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrikit/embedding.hpp"
#include "attrikit/geometry.hpp"
#include "attrikit/labels.hpp"
#include "attrikit/raster.hpp"

namespace attrikit {

/// An image handed to a backend. `name` is the dataset-relative file name and
/// identifies the image in error messages.
struct Image {
  std::string name;
  Raster raster;
};

struct GroundingResult {
  std::vector<Box> boxes;
  /// Visual embedding per box, parallel to `boxes`.
  std::vector<EmbeddingVector> box_embeddings;
  std::optional<EmbeddingVector> prompt_embedding;
};

/// Open-vocabulary detector driven by a text prompt sequence.
class GroundedDetectorBackend {
 public:
  virtual ~GroundedDetectorBackend() = default;
  virtual GroundingResult ground(std::span<const std::string> prompts,
                                 const Image& image,
                                 bool want_embeddings = true) const = 0;
};

/// Visual question answering over an image patch.
class CaptionVqaBackend {
 public:
  virtual ~CaptionVqaBackend() = default;
  virtual std::string answer(const Raster& patch,
                             std::string_view question) const = 0;
};

/// Free-text query answered with a list of words or short phrases.
class LanguageBackend {
 public:
  virtual ~LanguageBackend() = default;
  virtual std::vector<std::string> word_list(std::string_view query) const = 0;
};

/// One pooled feature vector per image from the teacher encoder and from the
/// student feature extractor.
struct FeaturePair {
  EmbeddingVector teacher;
  EmbeddingVector student;
};

enum class KdReduction { mean, sum };

/// Wire name of the distillation contract ("l1_mean" / "l1_sum").
const char* kd_contract_name(KdReduction r);
KdReduction kd_contract_from_name(const std::string& name);

struct TrainRequest {
  const PseudoLabelSet* labels = nullptr;
  /// Where the labels are persisted; remote trainers read from here.
  std::string dataset_uri;
  double alpha = 1.0;
  KdReduction kd = KdReduction::mean;
};

/// Backend-side view of one training step. Either `features` or `l_kd`
/// supplies the distillation term.
struct TrainStep {
  int step = 0;
  double l_det = 0.0;
  std::optional<double> l_kd;
  std::vector<FeaturePair> features;
};

struct TrainResult {
  std::string job_id;
  std::vector<TrainStep> steps;
};

/// Student detector trained to convergence on pseudo labels.
class DetectorTrainBackend {
 public:
  virtual ~DetectorTrainBackend() = default;
  virtual TrainResult train(const TrainRequest& request) = 0;
  virtual std::vector<Box> predict(const std::string& job_id,
                                   const Image& image) = 0;
};

/// Resolves dataset entries to pixels.
class ImageProvider {
 public:
  virtual ~ImageProvider() = default;
  virtual Image load(const AnnotatedImage& entry) const = 0;
};

/// Reads `<root>/<file_name>` as PPM.
class DirectoryImageProvider : public ImageProvider {
 public:
  explicit DirectoryImageProvider(std::filesystem::path root)
      : root_(std::move(root)) {}
  Image load(const AnnotatedImage& entry) const override;

 private:
  std::filesystem::path root_;
};

class InMemoryImageProvider : public ImageProvider {
 public:
  void add(std::string name, Raster raster);
  Image load(const AnnotatedImage& entry) const override;

 private:
  std::map<std::string, Raster> rasters_;
};

std::vector<Image> load_images(const Dataset& dataset, const ImageProvider& provider);

// Fixed natural-language queries.
std::string color_question(std::string_view noun);
std::string shape_question(std::string_view noun);
std::string synonym_query(std::string_view word);
std::string degree_query(std::string_view word);

}  // namespace attrikit
