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
#include "attrikit/skd.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "attrikit/error.hpp"
#include "attrikit/parallel.hpp"

namespace attrikit {

namespace fs = std::filesystem;

namespace {

// Labels exactly as they would read back from disk, so that a resumed
// schedule sees the same inputs as an uninterrupted one.
Dataset canonical_copy(const Dataset& d) {
  return parse_coco(parse_json(serialize_coco(d), "pseudo labels"), "pseudo labels");
}

void evaluate_into(RoundRecord& rec, const SkdConfig& cfg, const Dataset* truth) {
  if (truth == nullptr) return;
  rec.metrics = evaluate(rec.pseudo_labels.data, *truth, cfg.max_dets);
  if (rec.pseudo_labels.data.box_count() > 0) {
    rec.miou_nearest = miou_nearest(rec.pseudo_labels, *truth);
  }
}

}  // namespace

double kd_loss(const FeaturePair& pair, KdReduction reduction) {
  if (pair.teacher.dim() != pair.student.dim()) {
    throw ValidationError("feature dims differ: teacher " + std::to_string(pair.teacher.dim()) +
                          ", student " + std::to_string(pair.student.dim()));
  }
  if (pair.teacher.dim() == 0) throw ValidationError("empty feature vectors");
  double sum = 0.0;
  for (std::size_t i = 0; i < pair.teacher.dim(); ++i) {
    sum += std::abs(pair.teacher[i] - pair.student[i]);
  }
  return reduction == KdReduction::mean ? sum / static_cast<double>(pair.teacher.dim()) : sum;
}

double composite_loss(double l_det, double l_kd, double alpha) {
  if (!std::isfinite(l_det) || !std::isfinite(l_kd) || !std::isfinite(alpha)) {
    throw ValidationError("losses and alpha must be finite");
  }
  if (l_det < 0.0 || l_kd < 0.0) throw ValidationError("losses must be non-negative");
  return l_det + alpha * l_kd;
}

const char* to_string(StopRule rule) {
  return rule == StopRule::fixed_rounds ? "fixed_rounds" : "early_stop_on_val";
}

StopRule stop_rule_from_string(const std::string& s) {
  if (s == "fixed_rounds") return StopRule::fixed_rounds;
  if (s == "early_stop_on_val") return StopRule::early_stop_on_val;
  throw ConfigError("unknown stop rule '" + s + "'");
}

void SkdConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw ConfigError("score threshold must be in [0, 1]");
  }
  if (cap < 1) throw ConfigError("cap must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (max_dets < 1) throw ConfigError("max_dets must be >= 1");
}

std::vector<LossRecord> loss_report(const std::vector<TrainStep>& steps, const SkdConfig& cfg) {
  if (steps.empty()) throw TrainingError("backend reported no training steps");
  std::vector<LossRecord> out;
  out.reserve(steps.size());
  for (const auto& s : steps) {
    double l_kd;
    if (!s.features.empty()) {
      double sum = 0.0;
      for (const auto& p : s.features) sum += kd_loss(p, cfg.kd);
      l_kd = sum / static_cast<double>(s.features.size());
    } else if (s.l_kd) {
      l_kd = *s.l_kd;
    } else {
      throw TrainingError("step " + std::to_string(s.step) +
                          " carries neither feature pairs nor a distillation loss");
    }
    out.push_back({s.step, s.l_det, l_kd, composite_loss(s.l_det, l_kd, cfg.alpha)});
  }
  return out;
}

RoundRecord seed_round(PseudoLabelSet labels, const SkdConfig& cfg, const Dataset* truth) {
  cfg.validate();
  if (labels.round_index != 0 || labels.source != LabelSource::teacher) {
    throw ValidationError("the schedule must start from round 0 teacher labels");
  }
  labels.validate(cfg.cap);
  RoundRecord rec;
  rec.pseudo_labels = PseudoLabelSet{canonical_copy(labels.data), 0, LabelSource::teacher};
  evaluate_into(rec, cfg, truth);
  return rec;
}

RoundRecord run_round(const RoundRecord& state, DetectorTrainBackend& backend,
                      const SkdConfig& cfg, std::span<const Image> images, const Dataset* truth,
                      const std::string& dataset_uri) {
  cfg.validate();
  state.pseudo_labels.validate(cfg.cap);

  std::map<std::string, const Image*> by_name;
  for (const auto& img : images) by_name[img.name] = &img;
  const auto& entries = state.pseudo_labels.data.images;
  for (const auto& e : entries) {
    if (by_name.count(e.file_name) == 0) {
      throw ValidationError("no raster for training image " + e.file_name);
    }
  }

  TrainRequest request{&state.pseudo_labels, dataset_uri, cfg.alpha, cfg.kd};
  TrainResult trained = backend.train(request);

  RoundRecord next;
  next.round_index = state.round_index + 1;
  next.job_id = trained.job_id;
  next.train_report = loss_report(trained.steps, cfg);

  auto predicted = parallel_map(entries.size(), [&](std::size_t i) {
    const auto& e = entries[i];
    std::vector<Box> kept;
    for (const auto& b : backend.predict(trained.job_id, *by_name.at(e.file_name))) {
      if (auto c = clip_to_image(b, e.size)) kept.push_back(*c);
    }
    return filter_and_cap(kept, cfg.score_threshold, cfg.cap);
  });

  Dataset data;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    AnnotatedImage img = entries[i];
    img.boxes = std::move(predicted[i]);
    data.images.push_back(std::move(img));
  }
  next.pseudo_labels =
      PseudoLabelSet{canonical_copy(data), next.round_index, LabelSource::student};
  evaluate_into(next, cfg, truth);
  return next;
}

// --- persistence ------------------------------------------------------------

fs::path RoundStore::round_dir(int round_index) const {
  return root_ / ("round_" + std::to_string(round_index));
}

fs::path RoundStore::pseudo_labels_path(int round_index) const {
  return round_dir(round_index) / "pseudo_labels.json";
}

Json to_json(const LossRecord& r) {
  return {{"step", r.step}, {"l_det", r.l_det}, {"l_kd", r.l_kd}, {"composite", r.composite}};
}

void RoundStore::save(const RoundRecord& record) const {
  const fs::path target = round_dir(record.round_index);
  fs::path tmp = target;
  tmp += ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  write_file(tmp / "round.json",
             dump_canonical({{"round_index", record.round_index},
                             {"source", to_string(record.pseudo_labels.source)},
                             {"job_id", record.job_id}}));
  write_file(tmp / "pseudo_labels.json", serialize_coco(record.pseudo_labels.data));
  if (record.metrics) {
    Json m = to_json(*record.metrics);
    if (record.miou_nearest) m["miou_nearest"] = *record.miou_nearest;
    write_file(tmp / "metrics.json", dump_canonical(m));
  }
  std::string lines;
  for (const auto& l : record.train_report) lines += dump_canonical_line(to_json(l)) + "\n";
  write_file(tmp / "train_report.jsonl", lines);

  fs::remove_all(target);
  fs::rename(tmp, target);
}

RoundRecord RoundStore::load(int round_index) const {
  const fs::path dir = round_dir(round_index);
  if (!fs::is_directory(dir)) throw ParseError("missing round directory " + dir.string());
  RoundRecord rec;
  try {
    const Json meta = read_json(dir / "round.json");
    rec.round_index = meta.at("round_index").get<int>();
    rec.job_id = meta.at("job_id").get<std::string>();
    rec.pseudo_labels.source = label_source_from_string(meta.at("source").get<std::string>());
    if (rec.round_index != round_index) {
      throw ParseError(dir.string() + ": round_index " + std::to_string(rec.round_index));
    }
    rec.pseudo_labels.round_index = rec.round_index;
    rec.pseudo_labels.data = load_coco(dir / "pseudo_labels.json");
    if (fs::exists(dir / "metrics.json")) {
      const Json m = read_json(dir / "metrics.json");
      rec.metrics = metrics_from_json(m);
      if (m.contains("miou_nearest")) rec.miou_nearest = m.at("miou_nearest").get<double>();
    }
    std::istringstream lines(read_file(dir / "train_report.jsonl"));
    std::string line;
    while (std::getline(lines, line)) {
      if (trim(line).empty()) continue;
      const Json j = parse_json(line, (dir / "train_report.jsonl").string());
      rec.train_report.push_back({j.at("step").get<int>(), j.at("l_det").get<double>(),
                                  j.at("l_kd").get<double>(), j.at("composite").get<double>()});
    }
  } catch (const Json::exception& e) {
    throw ParseError(dir.string() + ": " + e.what());
  }
  return rec;
}

std::vector<RoundRecord> RoundStore::load_all() const {
  std::vector<RoundRecord> out;
  for (int r = 0; fs::is_directory(round_dir(r)); ++r) out.push_back(load(r));
  return out;
}

// --- schedule ---------------------------------------------------------------

void continue_schedule(std::vector<RoundRecord>& history, DetectorTrainBackend* backend,
                       const SkdConfig& cfg, std::span<const Image> images, const Dataset* truth,
                       const RoundStore* store) {
  cfg.validate();
  if (history.empty()) throw ValidationError("schedule history is empty");
  if (backend == nullptr) return;
  if (cfg.stop_rule == StopRule::early_stop_on_val && truth == nullptr) {
    throw ConfigError("early stopping needs validation truth");
  }

  double best = -1.0;
  int stale = 0;
  for (const auto& h : history) {
    if (!h.metrics) continue;
    if (h.metrics->map > best) {
      best = h.metrics->map;
      stale = 0;
    } else {
      ++stale;
    }
  }

  while (history.back().round_index < cfg.rounds) {
    if (cfg.stop_rule == StopRule::early_stop_on_val && stale >= cfg.patience) break;
    const RoundRecord& prev = history.back();
    const int r = prev.round_index + 1;
    RoundRecord next;
    try {
      const std::string uri = store ? store->pseudo_labels_path(prev.round_index).string() : "";
      next = run_round(prev, *backend, cfg, images, truth, uri);
    } catch (const Error& e) {
      throw RoundError(r, e);
    } catch (const std::exception& e) {
      throw RoundError(r, TrainingError(e.what()));
    }
    if (store) store->save(next);
    if (next.metrics) {
      if (next.metrics->map > best) {
        best = next.metrics->map;
        stale = 0;
      } else {
        ++stale;
      }
    }
    history.push_back(std::move(next));
  }
}

std::vector<RoundRecord> run_schedule(PseudoLabelSet seed_labels, DetectorTrainBackend* backend,
                                      const SkdConfig& cfg, std::span<const Image> images,
                                      const Dataset* truth, const RoundStore* store) {
  std::vector<RoundRecord> history;
  history.push_back(seed_round(std::move(seed_labels), cfg, truth));
  if (store) store->save(history.front());
  continue_schedule(history, backend, cfg, images, truth, store);
  return history;
}

}  // namespace attrikit
