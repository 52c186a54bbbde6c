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
#include "attrikit/app.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "attrikit/metrics.hpp"
#include "attrikit/mock_backends.hpp"
#include "attrikit/parallel.hpp"
#include "attrikit/synthetic.hpp"

namespace attrikit {

namespace fs = std::filesystem;

namespace {

constexpr Rgb kTruePositive{0, 200, 0};
constexpr Rgb kFalsePositive{220, 0, 0};
constexpr Rgb kFalseNegative{230, 210, 0};
constexpr double kOverlayIou = 0.5;

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

ImageSize parse_size(const std::string& s) {
  static const std::regex kSize(R"(^(\d+)(?:x(\d+))?$)");
  std::smatch m;
  if (!std::regex_match(s, m, kSize)) throw ConfigError("size must be N or WxH, got '" + s + "'");
  const int w = std::stoi(m[1].str());
  const int h = m[2].matched ? std::stoi(m[2].str()) : w;
  ImageSize size{w, h};
  if (!size.valid()) throw ConfigError("invalid size '" + s + "'");
  return size;
}

template <typename T>
T config_value(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError(what + " path is not set");
  if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: " + p.string());
}

void require_dir(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError(what + " path is not set");
  if (!fs::is_directory(p)) throw ConfigError(what + " not found: " + p.string());
}

// --- backends ---------------------------------------------------------------

struct Backends {
  std::shared_ptr<const SceneCatalog> catalog;
  std::unique_ptr<GroundedDetectorBackend> detector;
  std::unique_ptr<CaptionVqaBackend> vqa;
  std::unique_ptr<LanguageBackend> lm;
  std::unique_ptr<DetectorTrainBackend> trainer;
};

Backends make_backends(const RunConfig& cfg) {
  Backends b;
  if (cfg.backend == "mock") {
    require_file(cfg.scenes, "scene catalog (mock backend)");
    b.catalog = std::make_shared<SceneCatalog>(SceneCatalog::from_json(read_json(cfg.scenes)));
    b.detector = std::make_unique<MockGroundedDetector>(b.catalog);
    b.vqa = std::make_unique<MockVqa>();
    b.lm = std::make_unique<MockLanguage>();
    b.trainer = std::make_unique<MockStudent>(b.catalog);
  } else if (cfg.backend == "remote") {
    auto client = std::make_shared<const RemoteClient>(cfg.endpoint);
    b.detector = std::make_unique<RemoteGroundedDetector>(client);
    b.vqa = std::make_unique<RemoteVqa>(client);
    b.lm = std::make_unique<RemoteLanguage>(client);
    b.trainer = std::make_unique<RemoteTrainer>(client);
  } else {
    throw ConfigError("unknown backend '" + cfg.backend + "' (mock or remote)");
  }
  return b;
}

struct LoadedData {
  Dataset annotations;
  std::vector<Image> images;
};

LoadedData load_dataset(const RunConfig& cfg) {
  LoadedData d;
  d.annotations = load_coco(cfg.annotations);
  if (d.annotations.images.empty()) throw ValidationError(cfg.annotations.string() + " lists no images");
  d.images = load_images(d.annotations, DirectoryImageProvider(cfg.images));
  return d;
}

void validate_dataset_paths(const RunConfig& cfg) {
  require_file(cfg.annotations, "annotations");
  require_dir(cfg.images, "image directory");
  if (cfg.backend == "mock") require_file(cfg.scenes, "scene catalog (mock backend)");
}

// --- tables -----------------------------------------------------------------

std::string relevance_table(const PromptSequence& seq) {
  std::ostringstream os;
  os << "| rank | prompt | relevance | images | skipped |\n";
  os << "|---:|---|---:|---:|---:|\n";
  int rank = 1;
  for (const auto& e : seq.entries) {
    os << "| " << rank++ << " | " << e.prompt.rendered << " | " << fmt(e.relevance) << " | "
       << e.n_images << " | " << e.n_skipped << " |\n";
  }
  return os.str();
}

std::string metrics_table(const DetectionMetrics& m, std::optional<double> miou) {
  std::ostringstream os;
  os << "| metric | value |\n|---|---:|\n";
  os << "| mAP | " << fmt(m.map) << " |\n";
  os << "| AP50 | " << fmt(m.ap50) << " |\n";
  os << "| AP75 | " << fmt(m.ap75) << " |\n";
  os << "| AR | " << fmt(m.ar) << " |\n";
  os << "| mIoU_nearest | " << (miou ? fmt(*miou) : std::string("n/a")) << " |\n";
  return os.str();
}

std::string rounds_table(const std::vector<RoundRecord>& history) {
  std::ostringstream os;
  os << "| round | boxes | mAP | AP50 | AP75 | AR | mIoU_nearest | final loss |\n";
  os << "|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : history) {
    auto cell = [&](auto get) { return r.metrics ? fmt(get(*r.metrics)) : std::string("n/a"); };
    os << "| " << r.round_index << " | " << r.pseudo_labels.data.box_count() << " | "
       << cell([](const DetectionMetrics& m) { return m.map; }) << " | "
       << cell([](const DetectionMetrics& m) { return m.ap50; }) << " | "
       << cell([](const DetectionMetrics& m) { return m.ap75; }) << " | "
       << cell([](const DetectionMetrics& m) { return m.ar; }) << " | "
       << (r.miou_nearest ? fmt(*r.miou_nearest) : std::string("n/a")) << " | "
       << (r.train_report.empty() ? std::string("-") : fmt(r.train_report.back().composite))
       << " |\n";
  }
  return os.str();
}

// --- detection --------------------------------------------------------------

PseudoLabelSet detect_all(const Dataset& dataset, const std::vector<Image>& images,
                          const std::vector<std::string>& prompts,
                          const GroundedDetectorBackend& detector, double threshold, int cap) {
  if (prompts.empty()) throw ValidationError("prompt sequence is empty");
  auto boxes = parallel_map(images.size(), [&](std::size_t i) {
    std::vector<Box> kept;
    try {
      for (const auto& b : detector.ground(prompts, images[i], false).boxes) {
        if (auto c = clip_to_image(b, dataset.images[i].size)) kept.push_back(*c);
      }
    } catch (const TransportError&) {
      throw;
    } catch (const BackendError& e) {
      throw TransportError(e.what(), images[i].name);
    }
    return filter_and_cap(kept, threshold, cap);
  });
  PseudoLabelSet out;
  out.round_index = 0;
  out.source = LabelSource::teacher;
  for (std::size_t i = 0; i < dataset.images.size(); ++i) {
    AnnotatedImage img = dataset.images[i];
    img.boxes = std::move(boxes[i]);
    out.data.images.push_back(std::move(img));
  }
  return out;
}

Raster overlay(const Raster& raster, const std::vector<Box>& preds, const std::vector<Box>& truth) {
  Raster img = raster;
  const auto m = match_greedy(preds, truth, kOverlayIou);
  std::vector<char> truth_hit(truth.size(), 0);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (m.pred_to_truth[p]) {
      truth_hit[*m.pred_to_truth[p]] = 1;
      img.draw_rect(preds[p], kTruePositive);
    } else {
      img.draw_rect(preds[p], kFalsePositive);
    }
  }
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!truth_hit[t]) img.draw_rect(truth[t], kFalseNegative);
  }
  return img;
}

std::vector<std::string> read_prompt_file(const fs::path& path) {
  require_file(path, "prompt sequence");
  const Json j = read_json(path);
  if (j.is_array()) {
    std::vector<std::string> out;
    for (const auto& p : j) {
      if (!p.is_string()) throw ParseError(path.string() + ": prompt list must hold strings");
      out.push_back(p.get<std::string>());
    }
    return out;
  }
  return prompt_sequence_from_json(j).prompts();
}

// --- commands ---------------------------------------------------------------

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  SynthSpec spec;
  spec.seed = cfg.seed;
  spec.count = cfg.count;
  spec.size = cfg.size;
  spec.density = density_from_string(cfg.density);
  spec.objects_per_scene = cfg.objects;
  const auto scenes = generate_scenes(spec);
  write_synthetic_dataset(scenes, cfg.out);
  std::size_t boxes = 0;
  for (const auto& s : scenes) boxes += s.objects.size();
  out << "wrote " << scenes.size() << " scenes (" << boxes << " objects) to " << cfg.out.string()
      << "\n";
  return kExitOk;
}

int cmd_prompt(const RunConfig& cfg, std::ostream& out) {
  validate_dataset_paths(cfg);
  if (cfg.top_n < 1) throw ConfigError("top-n must be >= 1");
  if (cfg.top_k < 1) throw ConfigError("top-k must be >= 1");
  const auto data = load_dataset(cfg);
  auto backends = make_backends(cfg);

  AttributeLexicon lexicon;
  if (cfg.lexicon) {
    lexicon = *cfg.lexicon;
  } else {
    lexicon = generate_attributes(data.images, cfg.nouns, *backends.detector, *backends.vqa,
                                  cfg.top_k);
  }
  lexicon = augment_lexicon(lexicon, *backends.lm, cfg.augment);
  const auto seq =
      build_prompt_sequence(lexicon, data.images, *backends.detector, cfg.top_n, cfg.ablation);

  write_file(cfg.out / "lexicon.json", dump_canonical(to_json(lexicon)));
  write_file(cfg.out / "prompt_sequence.json", dump_canonical(to_json(seq)));
  const auto table = relevance_table(seq);
  write_file(cfg.out / "relevance_table.md", table);
  out << table;
  return kExitOk;
}

int cmd_detect(const RunConfig& cfg, std::ostream& out) {
  validate_dataset_paths(cfg);
  const auto prompts = read_prompt_file(cfg.prompts);
  cfg.skd.validate();
  const auto data = load_dataset(cfg);
  auto backends = make_backends(cfg);

  const auto labels = detect_all(data.annotations, data.images, prompts, *backends.detector,
                                 cfg.skd.score_threshold, cfg.skd.cap);
  save_coco(labels.data, cfg.out / "pseudo_labels.json");
  if (cfg.overlays) {
    for (std::size_t i = 0; i < data.images.size(); ++i) {
      write_ppm(cfg.out / "overlays" / data.images[i].name,
                overlay(data.images[i].raster, labels.data.images[i].boxes,
                        data.annotations.images[i].boxes));
    }
  }
  out << "detected " << labels.data.box_count() << " boxes on " << labels.data.images.size()
      << " images\n";
  if (data.annotations.box_count() > 0) {
    const auto m = evaluate(labels.data, data.annotations, cfg.skd.max_dets);
    std::optional<double> miou;
    if (labels.data.box_count() > 0) miou = miou_nearest(labels, data.annotations);
    out << metrics_table(m, miou);
  }
  return kExitOk;
}

int cmd_distill(const RunConfig& cfg, std::ostream& out) {
  validate_dataset_paths(cfg);
  cfg.skd.validate();
  if (cfg.pseudo.empty() && cfg.prompts.empty()) {
    throw ConfigError("distill needs --pseudo (round-0 labels) or --prompts");
  }
  if (!cfg.pseudo.empty()) require_file(cfg.pseudo, "round-0 pseudo labels");
  if (!cfg.prompts.empty()) require_file(cfg.prompts, "prompt sequence");

  const auto data = load_dataset(cfg);
  auto backends = make_backends(cfg);
  const Dataset* truth = data.annotations.box_count() > 0 ? &data.annotations : nullptr;
  const RoundStore store(cfg.out / "rounds");

  std::vector<RoundRecord> history;
  if (cfg.resume) history = store.load_all();
  if (history.empty()) {
    PseudoLabelSet seed;
    if (!cfg.pseudo.empty()) {
      seed.data = load_coco(cfg.pseudo);
    } else {
      seed = detect_all(data.annotations, data.images, read_prompt_file(cfg.prompts),
                        *backends.detector, cfg.skd.score_threshold, cfg.skd.cap);
    }
    history.push_back(seed_round(std::move(seed), cfg.skd, truth));
    store.save(history.front());
  }
  continue_schedule(history, backends.trainer.get(), cfg.skd, data.images, truth, &store);
  out << rounds_table(history);
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.preds, "predictions");
  require_file(cfg.truth, "truth");
  const Dataset truth = load_coco(cfg.truth);
  const Json pj = read_json(cfg.preds);
  const Dataset preds = pj.is_array() ? load_coco_results(cfg.preds, truth) : parse_coco(pj, cfg.preds.string());
  const auto m = evaluate(preds, truth, cfg.skd.max_dets);
  std::optional<double> miou;
  if (preds.box_count() > 0) miou = miou_nearest(preds, truth);

  Json j = to_json(m);
  if (miou) j["miou_nearest"] = *miou;
  write_file(cfg.out / "metrics.json", dump_canonical(j));
  out << metrics_table(m, miou);
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config: return kExitConfig;
    case ErrorCategory::backend: return kExitBackend;
    case ErrorCategory::data: return kExitData;
  }
  return kExitInternal;
}

void RunConfig::resolve_paths() {
  if (!dataset.empty()) {
    if (annotations.empty()) annotations = dataset / "annotations.json";
    if (images.empty()) images = dataset / "images";
    if (scenes.empty()) scenes = dataset / "scenes.json";
  }
}

void apply_config_json(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "backend") cfg.backend = config_value<std::string>(v, key);
    else if (key == "endpoint") cfg.endpoint.url = config_value<std::string>(v, key);
    else if (key == "endpoint_options") {
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "timeout_s") cfg.endpoint.timeout_s = config_value<double>(v2, k2);
        else if (k2 == "max_retries") cfg.endpoint.max_retries = config_value<int>(v2, k2);
        else if (k2 == "retry_backoff_s") cfg.endpoint.retry_backoff_s = config_value<double>(v2, k2);
        else if (k2 == "max_in_flight") cfg.endpoint.max_in_flight = config_value<int>(v2, k2);
        else if (k2 == "poll_interval_s") cfg.endpoint.poll_interval_s = config_value<double>(v2, k2);
        else if (k2 == "train_timeout_s") cfg.endpoint.train_timeout_s = config_value<double>(v2, k2);
        else throw ConfigError("unknown endpoint option '" + k2 + "'");
      }
    } else if (key == "seed") cfg.seed = config_value<std::uint64_t>(v, key);
    else if (key == "out") cfg.out = config_value<std::string>(v, key);
    else if (key == "dataset") cfg.dataset = config_value<std::string>(v, key);
    else if (key == "annotations") cfg.annotations = config_value<std::string>(v, key);
    else if (key == "images") cfg.images = config_value<std::string>(v, key);
    else if (key == "scenes") cfg.scenes = config_value<std::string>(v, key);
    else if (key == "nouns") cfg.nouns = config_value<std::vector<std::string>>(v, key);
    else if (key == "top_k") cfg.top_k = config_value<int>(v, key);
    else if (key == "top_n") cfg.top_n = config_value<int>(v, key);
    else if (key == "ablation") cfg.ablation = ablation_mode_from_string(config_value<std::string>(v, key));
    else if (key == "augment") {
      for (const auto& [k2, v2] : v.items()) {
        if (k2 == "synonyms") cfg.augment.synonyms = config_value<bool>(v2, k2);
        else if (k2 == "degrees") cfg.augment.degrees = config_value<bool>(v2, k2);
        else throw ConfigError("unknown augment option '" + k2 + "'");
      }
    } else if (key == "lexicon") {
      try {
        cfg.lexicon = lexicon_from_json(v);
      } catch (const Error& e) {
        throw ConfigError(std::string("config lexicon: ") + e.what());
      }
    } else if (key == "prompts") cfg.prompts = config_value<std::string>(v, key);
    else if (key == "pseudo") cfg.pseudo = config_value<std::string>(v, key);
    else if (key == "overlays") cfg.overlays = config_value<bool>(v, key);
    else if (key == "alpha") cfg.skd.alpha = config_value<double>(v, key);
    else if (key == "rounds") cfg.skd.rounds = config_value<int>(v, key);
    else if (key == "cap") cfg.skd.cap = config_value<int>(v, key);
    else if (key == "score_threshold") cfg.skd.score_threshold = config_value<double>(v, key);
    else if (key == "stop_rule") cfg.skd.stop_rule = stop_rule_from_string(config_value<std::string>(v, key));
    else if (key == "patience") cfg.skd.patience = config_value<int>(v, key);
    else if (key == "kd") {
      try {
        cfg.skd.kd = kd_contract_from_name(config_value<std::string>(v, key));
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "max_dets") cfg.skd.max_dets = config_value<int>(v, key);
    else if (key == "preds") cfg.preds = config_value<std::string>(v, key);
    else if (key == "truth") cfg.truth = config_value<std::string>(v, key);
    else if (key == "count") cfg.count = config_value<int>(v, key);
    else if (key == "size") {
      cfg.size = v.is_number_integer() ? parse_size(std::to_string(v.get<int>()))
                                       : parse_size(config_value<std::string>(v, key));
    } else if (key == "density") cfg.density = config_value<std::string>(v, key);
    else if (key == "objects") cfg.objects = config_value<int>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"attrikit: attribute prompts and self-trained distillation for nuclei detection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, backend, endpoint, out_dir, dataset, size, density, prompts, pseudo,
      preds, truth, ablation, stop_rule, kd;
  std::uint64_t seed = 0;
  int top_n = 0, rounds = 0, cap = 0, count = 0, objects = 0, top_k = 0;
  double alpha = 0.0, score_threshold = 0.0;
  bool no_overlays = false, resume = false;

  auto* o_config = app.add_option("--config", config_path, "JSON config file");
  auto* o_backend = app.add_option("--backend", backend, "mock or remote")
                        ->check(CLI::IsMember({"mock", "remote"}));
  auto* o_endpoint = app.add_option("--endpoint", endpoint, "gateway URL (default $ATTRIKIT_ENDPOINT)");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_dataset = app.add_option("--dataset", dataset, "dataset directory");
  auto* o_top_n = app.add_option("--top-n", top_n, "prompts kept in the sequence");
  auto* o_alpha = app.add_option("--alpha", alpha, "distillation weight");
  auto* o_rounds = app.add_option("--rounds", rounds, "self-training rounds");
  auto* o_cap = app.add_option("--cap", cap, "pseudo labels kept per image");
  auto* o_thr = app.add_option("--score-threshold", score_threshold, "minimum pseudo-label score");

  auto* synth = app.add_subcommand("synth", "write a seeded synthetic dataset");
  auto* o_count = synth->add_option("--count", count, "number of scenes");
  auto* o_size = synth->add_option("--size", size, "N or WxH");
  auto* o_density = synth->add_option("--density", density, "sparse or dense");
  auto* o_objects = synth->add_option("--objects", objects, "objects per scene");

  auto* prompt = app.add_subcommand("prompt", "build the attribute prompt sequence");
  auto* o_top_k = prompt->add_option("--top-k", top_k, "answers kept per attribute kind");
  auto* o_ablation = prompt->add_option("--ablation", ablation, "full, shape_only, color_only or noun_only");

  auto* detect = app.add_subcommand("detect", "zero-shot pseudo labels from a prompt sequence");
  auto* o_prompts = detect->add_option("--prompts", prompts, "prompt_sequence.json");
  detect->add_flag("--no-overlays", no_overlays, "skip overlay images");

  auto* distill = app.add_subcommand("distill", "self-trained distillation rounds");
  auto* o_prompts2 = distill->add_option("--prompts", prompts, "prompt_sequence.json for round 0");
  auto* o_pseudo = distill->add_option("--pseudo", pseudo, "round-0 pseudo labels");
  auto* o_stop = distill->add_option("--stop-rule", stop_rule, "fixed_rounds or early_stop_on_val");
  auto* o_kd = distill->add_option("--kd", kd, "l1_mean or l1_sum");
  distill->add_flag("--resume", resume, "continue from existing round directories");

  auto* eval = app.add_subcommand("eval", "score predictions against truth");
  eval->add_option("--preds", preds, "predictions (COCO dataset or results array)");
  eval->add_option("--truth", truth, "ground truth COCO file");

  std::vector<std::string> argv_store{"attrikit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg;
    if (const char* env = std::getenv("ATTRIKIT_ENDPOINT")) cfg.endpoint.url = env;
    if (o_config->count()) {
      require_file(config_path, "config");
      Json j;
      try {
        j = read_json(config_path);
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
      apply_config_json(cfg, j);
    }
    if (o_backend->count()) cfg.backend = backend;
    if (o_endpoint->count()) cfg.endpoint.url = endpoint;
    if (o_seed->count()) cfg.seed = seed;
    if (o_out->count()) cfg.out = out_dir;
    if (o_dataset->count()) cfg.dataset = dataset;
    if (o_top_n->count()) cfg.top_n = top_n;
    if (o_alpha->count()) cfg.skd.alpha = alpha;
    if (o_rounds->count()) cfg.skd.rounds = rounds;
    if (o_cap->count()) cfg.skd.cap = cap;
    if (o_thr->count()) cfg.skd.score_threshold = score_threshold;
    if (!preds.empty()) cfg.preds = preds;
    if (!truth.empty()) cfg.truth = truth;
    if (o_count->count()) cfg.count = count;
    if (o_size->count()) cfg.size = parse_size(size);
    if (o_density->count()) cfg.density = density;
    if (o_objects->count()) cfg.objects = objects;
    if (o_top_k->count()) cfg.top_k = top_k;
    if (o_ablation->count()) cfg.ablation = ablation_mode_from_string(ablation);
    if (o_prompts->count() || o_prompts2->count()) cfg.prompts = prompts;
    if (o_pseudo->count()) cfg.pseudo = pseudo;
    if (o_stop->count()) cfg.skd.stop_rule = stop_rule_from_string(stop_rule);
    if (o_kd->count()) {
      try {
        cfg.skd.kd = kd_contract_from_name(kd);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    if (no_overlays) cfg.overlays = false;
    if (resume) cfg.resume = true;
    cfg.resolve_paths();
    cfg.skd.validate();
    if (cfg.backend == "remote") cfg.endpoint.validate();

    if (synth->parsed()) return cmd_synth(cfg, out);
    if (prompt->parsed()) return cmd_prompt(cfg, out);
    if (detect->parsed()) return cmd_detect(cfg, out);
    if (distill->parsed()) return cmd_distill(cfg, out);
    if (eval->parsed()) return cmd_eval(cfg, out);
    throw ConfigError("no command given");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace attrikit
