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
#include "attrikit/mock_backends.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <sstream>

#include "attrikit/error.hpp"

namespace attrikit {

namespace {

constexpr std::uint64_t kDetectSalt = 0xde7ec7de7ec7ULL;
constexpr std::uint64_t kSpuriousSalt = 0xfa15e0b1ec7ULL;
constexpr double kEmbeddingNoise = 0.15;
constexpr int kSpuriousAttempts = 50;
constexpr std::uint8_t kForegroundMax = 205;

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> m{
      {"circular", "round"}, {"violet", "purple"}, {"nucleus", "nuclei"}};
  return m;
}

bool is_modifier(const std::string& w) {
  static const std::set<std::string> m{"slightly", "moderately", "mostly", "relatively",
                                       "dark",     "rich",       "vibrant", "light",
                                       "pale",     "deep"};
  return m.count(w) > 0;
}

std::string fold(const std::string& w) {
  auto it = aliases().find(w);
  return it == aliases().end() ? w : it->second;
}

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

void add_scaled(std::vector<double>& acc, const EmbeddingVector& v, double scale) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * v[i];
}

EmbeddingVector normalized(std::vector<double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
  return EmbeddingVector(std::move(v));
}

std::string hue_word(double h) {
  if (h < 20) return "red";
  if (h < 45) return "orange";
  if (h < 70) return "yellow";
  if (h < 160) return "green";
  if (h < 200) return "cyan";
  if (h < 255) return "blue";
  if (h < 300) return "purple";
  if (h < 345) return "pink";
  return "red";
}

std::optional<double> hue_of(const Rgb& p) {
  const double r = p[0], g = p[1], b = p[2];
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double d = mx - mn;
  if (d <= 0.0) return std::nullopt;
  double h;
  if (mx == r) {
    h = 60.0 * std::fmod((g - b) / d, 6.0);
  } else if (mx == g) {
    h = 60.0 * ((b - r) / d + 2.0);
  } else {
    h = 60.0 * ((r - g) / d + 4.0);
  }
  if (h < 0.0) h += 360.0;
  return h;
}

bool is_foreground(const Rgb& p) {
  return std::max({p[0], p[1], p[2]}) < kForegroundMax;
}

std::string dominant_hue(const Raster& patch) {
  static const std::array<const char*, 8> order{"red",  "orange", "yellow", "green",
                                                "cyan", "blue",   "purple", "pink"};
  std::map<std::string, int> counts;
  for (int y = 0; y < patch.height(); ++y) {
    for (int x = 0; x < patch.width(); ++x) {
      const Rgb p = patch.at(x, y);
      if (!is_foreground(p)) continue;
      if (auto h = hue_of(p)) ++counts[hue_word(*h)];
    }
  }
  std::string best;
  int best_n = 0;
  for (const char* w : order) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > best_n) {
      best = w;
      best_n = it->second;
    }
  }
  return best;
}

// Pixels of the largest 4-connected foreground component.
std::vector<std::pair<int, int>> largest_blob(const Raster& patch) {
  const int w = patch.width(), h = patch.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> best;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const auto idx0 = static_cast<std::size_t>(y0) * w + x0;
      if (seen[idx0] || !is_foreground(patch.at(x0, y0))) continue;
      std::vector<std::pair<int, int>> comp;
      std::deque<std::pair<int, int>> queue{{x0, y0}};
      seen[idx0] = 1;
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        comp.emplace_back(x, y);
        const std::array<std::pair<int, int>, 4> nb{{{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}}};
        for (auto [nx, ny] : nb) {
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto idx = static_cast<std::size_t>(ny) * w + nx;
          if (seen[idx] || !is_foreground(patch.at(nx, ny))) continue;
          seen[idx] = 1;
          queue.emplace_back(nx, ny);
        }
      }
      if (comp.size() > best.size()) best = std::move(comp);
    }
  }
  return best;
}

std::string blob_shape(const Raster& patch) {
  const auto blob = largest_blob(patch);
  if (blob.size() < 5) return "";
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : blob) {
    mx += x;
    my += y;
  }
  const double n = static_cast<double>(blob.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (auto [x, y] : blob) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  sxx /= n;
  syy /= n;
  sxy /= n;
  const double tr = sxx + syy;
  const double disc = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) / 4.0 + sxy * sxy));
  const double l1 = tr / 2.0 + disc, l2 = tr / 2.0 - disc;
  if (l1 <= 0.0) return "round";
  const double ecc = std::sqrt(std::max(0.0, 1.0 - l2 / l1));
  return ecc > MockVqa::kElongatedEccentricity ? "elongated" : "round";
}

std::string after_prefix(const std::string& q, std::string_view prefix) {
  if (q.rfind(prefix, 0) != 0) return "";
  std::string rest = q.substr(prefix.size());
  if (auto comma = rest.find(','); comma != std::string::npos) rest.resize(comma);
  while (!rest.empty() && (rest.back() == '?' || rest.back() == '.')) rest.pop_back();
  return trim(rest);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Index of the truth with the largest IoU, or -1 when nothing overlaps.
int best_truth(const Box& p, std::span<const Box> truth) {
  int best = -1;
  double best_iou = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const double v = iou(p, truth[t]);
    if (v > best_iou) {
      best_iou = v;
      best = static_cast<int>(t);
    }
  }
  return best;
}

}  // namespace

EmbeddingVector hash_unit_vector(std::string_view key, std::size_t dim) {
  Rng rng(mix64(fnv1a64(key)));
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return normalized(std::move(v));
}

std::vector<std::string> prompt_concepts(std::string_view prompt) {
  std::vector<std::string> tokens;
  std::istringstream in{to_lower(prompt)};
  std::string tok;
  while (in >> tok) {
    while (!tok.empty() && (tok.back() == '.' || tok.back() == ',')) tok.pop_back();
    if (!tok.empty()) tokens.push_back(tok);
  }
  std::vector<std::string> out;
  auto push = [&](const std::string& c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_modifier(tokens[i]) && i + 1 < tokens.size() && !is_modifier(tokens[i + 1])) {
      const std::string base = fold(tokens[i + 1]);
      push(tokens[i] + " " + base);
      push(base);
      ++i;
    } else {
      push(fold(tokens[i]));
    }
  }
  return out;
}

// --- grounding --------------------------------------------------------------

MockGroundedDetector::MockGroundedDetector(std::shared_ptr<const SceneCatalog> catalog)
    : catalog_(std::move(catalog)) {
  if (!catalog_) throw ConfigError("mock detector needs a scene catalog");
}

std::vector<double> MockGroundedDetector::prompt_quality(std::span<const std::string> prompts,
                                                         const SyntheticScene& scene) const {
  std::map<std::string, double> weight;
  double w = 1.0;
  for (const auto& p : prompts) {
    for (const auto& c : prompt_concepts(p)) {
      weight.try_emplace(c, w);  // first mention is the heaviest
    }
    w *= kPromptOrderDecay;
  }
  std::vector<double> q;
  q.reserve(scene.objects.size());
  for (const auto& o : scene.objects) {
    const auto labels = o.labels();
    double sum = 0.0;
    for (const auto& l : labels) {
      auto it = weight.find(l);
      if (it != weight.end()) sum += it->second;
    }
    q.push_back(labels.empty() ? 0.0 : sum / static_cast<double>(labels.size()));
  }
  return q;
}

EmbeddingVector MockGroundedDetector::prompt_embedding(std::span<const std::string> prompts) const {
  auto acc = zeros(kMockEmbeddingDim);
  double w = 1.0;
  for (const auto& p : prompts) {
    for (const auto& c : prompt_concepts(p)) add_scaled(acc, hash_unit_vector(c), w);
    w *= kPromptOrderDecay;
  }
  return normalized(std::move(acc));
}

EmbeddingVector MockGroundedDetector::object_embedding(const SyntheticScene& scene,
                                                       std::size_t index) const {
  auto acc = zeros(kMockEmbeddingDim);
  add_scaled(acc, hash_unit_vector("nuclei"), 1.0);
  for (const auto& l : scene.objects.at(index).labels()) add_scaled(acc, hash_unit_vector(l), 1.0);
  add_scaled(acc, hash_unit_vector(scene.name + "#" + std::to_string(index)), kEmbeddingNoise);
  return normalized(std::move(acc));
}

GroundingResult MockGroundedDetector::ground(std::span<const std::string> prompts,
                                             const Image& image, bool want_embeddings) const {
  const SyntheticScene& scene = catalog_->at(image.name);
  GroundingResult out;
  if (prompts.empty()) return out;

  const auto q = prompt_quality(prompts, scene);
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    Rng rng(mix64(scene.seed ^ kDetectSalt ^ mix64(i + 1)));
    const double u = rng.uniform();
    std::array<double, 4> d{};
    for (auto& x : d) x = rng.uniform(-1.0, 1.0);
    const double u_s = rng.uniform();
    if (u >= 0.55 + 0.4 * q[i]) continue;

    const Box& t = scene.objects[i].box;
    const double amp = 0.02 + 0.13 * (1.0 - q[i]);
    Box b{t.x_min + d[0] * amp * t.width(), t.y_min + d[1] * amp * t.height(),
          t.x_max + d[2] * amp * t.width(), t.y_max + d[3] * amp * t.height()};
    auto clipped = clip_to_image(b, scene.size);
    if (!clipped) continue;
    clipped->score = std::clamp(0.3 + 0.6 * q[i] + 0.1 * (u_s - 0.5), 0.0, 1.0);
    out.boxes.push_back(*clipped);
    if (want_embeddings) out.box_embeddings.push_back(object_embedding(scene, i));
  }

  const double mean_q =
      q.empty() ? 0.0 : std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(q.size());
  const auto n_spurious =
      static_cast<int>(std::lround(0.25 * static_cast<double>(scene.objects.size()) * (1.0 - mean_q)));
  Rng rng(mix64(scene.seed ^ kSpuriousSalt));
  for (int k = 0; k < n_spurious; ++k) {
    // Background hits: placed clear of every object when possible.
    std::optional<Box> clipped;
    for (int attempt = 0; attempt < kSpuriousAttempts && !clipped; ++attempt) {
      const double w = rng.uniform(8.0, 20.0), h = rng.uniform(8.0, 20.0);
      const double x = rng.uniform(0.0, std::max(0.0, scene.size.width - w));
      const double y = rng.uniform(0.0, std::max(0.0, scene.size.height - h));
      const Box b{x, y, x + w, y + h};
      const bool clear = std::none_of(scene.objects.begin(), scene.objects.end(),
                                      [&](const SceneObject& o) { return iou(b, o.box) > 0.0; });
      if (clear) clipped = clip_to_image(b, scene.size);
    }
    const double s = rng.uniform(0.05, 0.45);
    if (!clipped) continue;
    clipped->score = s;
    out.boxes.push_back(*clipped);
    if (want_embeddings) {
      auto acc = zeros(kMockEmbeddingDim);
      add_scaled(acc, hash_unit_vector("background"), 1.0);
      add_scaled(acc, hash_unit_vector(scene.name + "#bg" + std::to_string(k)), 0.3);
      out.box_embeddings.push_back(normalized(std::move(acc)));
    }
  }
  if (want_embeddings) out.prompt_embedding = prompt_embedding(prompts);
  return out;
}

// --- VQA --------------------------------------------------------------------

std::string MockVqa::answer(const Raster& patch, std::string_view question) const {
  const std::string q = to_lower(question);
  if (q.find("color") != std::string::npos || q.find("colour") != std::string::npos) {
    return dominant_hue(patch);
  }
  if (q.find("shape") != std::string::npos) return blob_shape(patch);
  return "";
}

// --- language ---------------------------------------------------------------

const std::map<std::string, std::vector<std::string>>& MockLanguage::synonyms() {
  static const std::map<std::string, std::vector<std::string>> m{
      {"purple", {"violet", "plum-colored", "purple-blue"}},
      {"round", {"circular", "elliptical"}},
  };
  return m;
}

const std::map<std::string, std::vector<std::string>>& MockLanguage::degrees() {
  static const std::map<std::string, std::vector<std::string>> m{
      {"purple", {"dark purple", "rich purple", "vibrant purple"}},
      {"round", {"slightly round", "moderately round", "mostly round"}},
  };
  return m;
}

std::vector<std::string> MockLanguage::word_list(std::string_view query) const {
  const std::string q = trim(to_lower(query));
  const std::string syn_prefix = to_lower(synonym_query(""));
  const std::string deg_prefix = to_lower(degree_query(""));
  // The templates end with the word (degrees) or continue after it (synonyms).
  const std::string syn_head = syn_prefix.substr(0, syn_prefix.find(','));
  const std::map<std::string, std::vector<std::string>>* table = nullptr;
  std::string word;
  if (!syn_head.empty() && q.rfind(syn_head, 0) == 0) {
    table = &synonyms();
    word = after_prefix(q, syn_head);
  } else if (q.rfind(deg_prefix, 0) == 0) {
    table = &degrees();
    word = after_prefix(q, deg_prefix);
  }
  if (table == nullptr) return {};
  auto it = table->find(word);
  return it == table->end() ? std::vector<std::string>{} : it->second;
}

// --- student ----------------------------------------------------------------

std::vector<Box> refine_toward_truth(std::span<const Box> pseudo, std::span<const Box> truth,
                                     double factor) {
  std::vector<Box> out;
  std::vector<char> covered(truth.size(), 0);
  double score_sum = 0.0;
  for (const auto& p : pseudo) {
    score_sum += p.score.value_or(1.0);
    const int t = best_truth(p, truth);
    if (t < 0) {
      out.push_back(p);
      continue;
    }
    covered[t] = 1;
    const Box& g = truth[t];
    Box r{p.x_min + factor * (g.x_min - p.x_min), p.y_min + factor * (g.y_min - p.y_min),
          p.x_max + factor * (g.x_max - p.x_max), p.y_max + factor * (g.y_max - p.y_max)};
    r.score = p.score;
    out.push_back(r);
  }
  if (!pseudo.empty()) {
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (covered[t]) continue;
      Box add = truth[t];
      add.score = score_sum / static_cast<double>(pseudo.size());
      out.push_back(add);
      break;
    }
  }
  return out;
}

MockStudent::MockStudent(std::shared_ptr<const SceneCatalog> catalog)
    : catalog_(std::move(catalog)) {
  if (!catalog_) throw ConfigError("mock student needs a scene catalog");
}

TrainResult MockStudent::train(const TrainRequest& request) {
  if (request.labels == nullptr) throw TrainingError("no pseudo labels supplied");
  const Dataset& data = request.labels->data;
  if (data.box_count() == 0) throw TrainingError("pseudo label set is empty");

  std::map<std::string, std::vector<Box>> model;
  double residual = 0.0;
  std::size_t n_boxes = 0;
  for (const auto& img : data.images) {
    const SyntheticScene* scene = catalog_->find(img.file_name);
    if (scene == nullptr) throw TrainingError("no scene metadata for image " + img.file_name);
    const auto truth = scene->truth_boxes();
    for (const auto& p : img.boxes) {
      const int t = best_truth(p, truth);
      residual += t < 0 ? 1.0 : 1.0 - iou(p, truth[t]);
      ++n_boxes;
    }
    model[img.file_name] = refine_toward_truth(img.boxes, truth, kLearningFactor);
  }
  residual /= static_cast<double>(n_boxes);

  TrainResult result;
  result.job_id = "mock-" + hex64(fnv1a64(serialize_coco(data)));
  for (int e = 0; e < kEpochs; ++e) {
    TrainStep step;
    step.step = e;
    step.l_det = (0.2 + residual) * std::pow(0.6, e) + 0.05;
    for (const auto& img : data.images) {
      const auto teacher = hash_unit_vector("teacher/" + img.file_name);
      const auto noise = hash_unit_vector("student/" + img.file_name);
      std::vector<double> s(teacher.values().begin(), teacher.values().end());
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += std::pow(0.5, e + 1) * noise[i];
      step.features.push_back(FeaturePair{teacher, EmbeddingVector(std::move(s))});
    }
    result.steps.push_back(std::move(step));
  }

  std::lock_guard lock(mu_);
  jobs_[result.job_id] = std::move(model);
  return result;
}

std::vector<Box> MockStudent::predict(const std::string& job_id, const Image& image) {
  std::lock_guard lock(mu_);
  auto job = jobs_.find(job_id);
  if (job == jobs_.end()) throw TrainingError("unknown training job '" + job_id + "'");
  auto it = job->second.find(image.name);
  return it == job->second.end() ? std::vector<Box>{} : it->second;
}

}  // namespace attrikit
