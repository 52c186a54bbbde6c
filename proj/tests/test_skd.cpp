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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>

#include "attrikit/error.hpp"
#include "attrikit/mock_backends.hpp"
#include "attrikit/skd.hpp"
#include "support/harness.hpp"

using namespace attrikit;
using testing_support::Harness;
using testing_support::scratch_dir;
namespace fs = std::filesystem;

namespace {

// Predicts exactly the labels it was trained on.
class EchoBackend : public DetectorTrainBackend {
 public:
  TrainResult train(const TrainRequest& request) override {
    labels_.clear();
    for (const auto& img : request.labels->data.images) labels_[img.file_name] = img.boxes;
    ++trained;
    return TrainResult{"echo-" + std::to_string(trained), {TrainStep{0, 0.5, 0.25, {}}}};
  }
  std::vector<Box> predict(const std::string&, const Image& image) override {
    return labels_.at(image.name);
  }
  int trained = 0;

 private:
  std::map<std::string, std::vector<Box>> labels_;
};

// Wraps another backend and fails training on a chosen call.
class FailingBackend : public DetectorTrainBackend {
 public:
  FailingBackend(DetectorTrainBackend& inner, int fail_on) : inner_(inner), fail_on_(fail_on) {}
  TrainResult train(const TrainRequest& request) override {
    if (++calls_ == fail_on_) throw TrainingError("out of memory");
    return inner_.train(request);
  }
  std::vector<Box> predict(const std::string& job, const Image& image) override {
    return inner_.predict(job, image);
  }

 private:
  DetectorTrainBackend& inner_;
  int fail_on_;
  int calls_ = 0;
};

PseudoLabelSet teacher_labels(const Harness& h) {
  MockGroundedDetector det(h.catalog);
  const std::vector<std::string> prompts{"slightly round dark purple nuclei.", "round purple nuclei."};
  PseudoLabelSet s;
  s.data = h.truth;
  for (std::size_t i = 0; i < h.images.size(); ++i) {
    s.data.images[i].boxes = filter_and_cap(det.ground(prompts, h.images[i], false).boxes,
                                            kDefaultScoreThreshold, kDefaultPseudoLabelCap);
  }
  return s;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("kd_loss examples") {
  CHECK(kd_loss(FeaturePair{{1, 2, 3}, {2, 2, 1}}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kd_loss(FeaturePair{{1, 2, 3}, {2, 2, 1}}, KdReduction::sum) == doctest::Approx(3.0));
  CHECK(kd_loss(FeaturePair{{0.5, -2, 7}, {0.5, -2, 7}}) == 0.0);
  CHECK_THROWS_AS(kd_loss(FeaturePair{{1, 2}, {1, 2, 3}}), ValidationError);
}

TEST_CASE("kd_loss is a metric") {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 32));
    std::vector<double> va(d), vb(d), vc(d);
    for (std::size_t i = 0; i < d; ++i) {
      va[i] = rng.uniform(-3, 3);
      vb[i] = rng.uniform(-3, 3);
      vc[i] = rng.uniform(-3, 3);
    }
    const EmbeddingVector a(va), b(vb), c(vc);
    const double ab = kd_loss({a, b}), ba = kd_loss({b, a});
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(kd_loss({a, a}) == 0.0);
    CHECK(ab <= kd_loss({a, c}) + kd_loss({c, b}) + 1e-12);
    CHECK(kd_loss({a, b}, KdReduction::sum) == doctest::Approx(ab * static_cast<double>(d)));
  }
}

TEST_CASE("composite loss") {
  CHECK(composite_loss(0.5, 0.2, 1.0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(composite_loss(0.5, 0.2, 0.0) == 0.5);
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(composite_loss(0.5, 0.2, alpha) == doctest::Approx(0.5 + alpha * 0.2).epsilon(1e-15));
  }
  CHECK_THROWS_AS(composite_loss(-0.1, 0.2, 1.0), ValidationError);
  CHECK_THROWS_AS(composite_loss(0.1, NAN, 1.0), ValidationError);
  CHECK_THROWS_AS(composite_loss(0.1, 0.2, INFINITY), ValidationError);
}

TEST_CASE("loss report") {
  SkdConfig cfg;
  cfg.alpha = 2.0;
  const std::vector<TrainStep> steps{TrainStep{0, 0.5, 9.0, {FeaturePair{{1, 2, 3}, {2, 2, 1}}}},
                                     TrainStep{1, 0.25, 0.125, {}}};
  const auto r = loss_report(steps, cfg);
  REQUIRE(r.size() == 2);
  CHECK(r[0].l_kd == doctest::Approx(1.0));
  CHECK(r[0].composite == doctest::Approx(2.5));
  CHECK(r[1].composite == doctest::Approx(0.5));
  CHECK_THROWS_AS(loss_report({}, cfg), TrainingError);
  CHECK_THROWS_AS(loss_report({TrainStep{0, 0.5, std::nullopt, {}}}, cfg), TrainingError);
}

TEST_CASE("config validation") {
  SkdConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.rounds == 4);
  CHECK(cfg.alpha == 1.0);
  CHECK(cfg.cap == 20);
  cfg.rounds = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.alpha = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.score_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(stop_rule_from_string("early_stop_on_val") == StopRule::early_stop_on_val);
  CHECK_THROWS_AS(stop_rule_from_string("never"), ConfigError);
}

TEST_CASE("an echoing student is a fixed point") {
  Harness h(7, 5, 12);
  EchoBackend echo;
  SkdConfig cfg;
  cfg.rounds = 3;
  const auto history = run_schedule(teacher_labels(h), &echo, cfg, h.images, &h.truth);
  REQUIRE(history.size() == 4);
  for (std::size_t r = 1; r < history.size(); ++r) {
    CHECK(history[r].round_index == static_cast<int>(r));
    CHECK(history[r].pseudo_labels.source == LabelSource::student);
    CHECK(history[r].pseudo_labels.data == history[0].pseudo_labels.data);
    CHECK(history[r].metrics->map == history[0].metrics->map);
    REQUIRE(history[r].train_report.size() == 1);
    CHECK(history[r].train_report[0].composite == doctest::Approx(0.75));
  }
  CHECK(echo.trained == 3);
}

TEST_CASE("round counts") {
  Harness h(7, 3, 8);
  EchoBackend echo;
  SkdConfig cfg;
  cfg.rounds = 1;
  CHECK(run_schedule(teacher_labels(h), &echo, cfg, h.images).size() == 2);
  const auto seed_only = run_schedule(teacher_labels(h), nullptr, cfg, h.images);
  REQUIRE(seed_only.size() == 1);
  CHECK(seed_only[0].round_index == 0);
  CHECK(seed_only[0].pseudo_labels.source == LabelSource::teacher);
  CHECK_FALSE(seed_only[0].metrics);
}

TEST_CASE("the schedule must start from teacher labels") {
  Harness h(7, 3, 8);
  auto labels = teacher_labels(h);
  labels.round_index = 1;
  labels.source = LabelSource::student;
  CHECK_THROWS_AS(run_schedule(labels, nullptr, SkdConfig{}, h.images), ValidationError);
}

TEST_CASE("failures carry the round index") {
  Harness h(7, 4, 10);
  MockStudent student(h.catalog);
  FailingBackend failing(student, 2);
  SkdConfig cfg;
  const auto dir = scratch_dir("skd_fail");
  RoundStore store(dir);
  try {
    run_schedule(teacher_labels(h), &failing, cfg, h.images, &h.truth, &store);
    FAIL("expected a RoundError");
  } catch (const RoundError& e) {
    CHECK(e.round_index() == 2);
    CHECK(e.category() == ErrorCategory::backend);
    CHECK(std::string(e.what()).find("out of memory") != std::string::npos);
  }
  // Completed rounds stay on disk.
  CHECK(store.load_all().size() == 2);
  CHECK_FALSE(fs::exists(dir / "round_2"));
}

TEST_CASE("missing rasters are a validation failure") {
  Harness h(7, 3, 8);
  EchoBackend echo;
  std::vector<Image> partial(h.images.begin(), h.images.begin() + 1);
  CHECK_THROWS_AS(run_schedule(teacher_labels(h), &echo, SkdConfig{}, partial), RoundError);
}

TEST_CASE("round store round trip") {
  Harness h(9, 4, 10);
  MockStudent student(h.catalog);
  SkdConfig cfg;
  cfg.rounds = 2;
  const auto dir = scratch_dir("skd_store");
  RoundStore store(dir);
  const auto history = run_schedule(teacher_labels(h), &student, cfg, h.images, &h.truth, &store);
  const auto loaded = store.load_all();
  REQUIRE(loaded.size() == history.size());
  for (std::size_t r = 0; r < history.size(); ++r) {
    CHECK(loaded[r].pseudo_labels == history[r].pseudo_labels);
    CHECK(loaded[r].job_id == history[r].job_id);
    CHECK(loaded[r].train_report.size() == history[r].train_report.size());
    REQUIRE(loaded[r].metrics);
    CHECK(std::abs(loaded[r].metrics->map - history[r].metrics->map) < 1e-8);
  }
  CHECK(fs::exists(dir / "round_1" / "train_report.jsonl"));
  CHECK_FALSE(fs::exists(dir / "round_1.tmp"));
  CHECK_THROWS_AS(store.load(7), ParseError);
}

TEST_CASE("resuming reproduces an uninterrupted run byte for byte") {
  Harness h(9, 5, 12);
  SkdConfig cfg;
  cfg.rounds = 3;
  const auto labels = teacher_labels(h);

  const auto full_dir = scratch_dir("skd_full");
  {
    MockStudent student(h.catalog);
    RoundStore store(full_dir);
    run_schedule(labels, &student, cfg, h.images, &h.truth, &store);
  }

  const auto part_dir = scratch_dir("skd_part");
  {
    MockStudent student(h.catalog);
    RoundStore store(part_dir);
    SkdConfig short_cfg = cfg;
    short_cfg.rounds = 1;
    run_schedule(labels, &student, short_cfg, h.images, &h.truth, &store);
  }
  {
    MockStudent fresh(h.catalog);
    RoundStore store(part_dir);
    auto history = store.load_all();
    REQUIRE(history.size() == 2);
    continue_schedule(history, &fresh, cfg, h.images, &h.truth, &store);
    CHECK(history.size() == 4);
  }
  CHECK(read_tree(full_dir) == read_tree(part_dir));
}

TEST_CASE("early stopping ends after a plateau") {
  Harness h(7, 4, 10);
  EchoBackend echo;
  SkdConfig cfg;
  cfg.rounds = 6;
  cfg.stop_rule = StopRule::early_stop_on_val;
  cfg.patience = 2;
  const auto history = run_schedule(teacher_labels(h), &echo, cfg, h.images, &h.truth);
  CHECK(history.size() == 3);
  CHECK_THROWS_AS(run_schedule(teacher_labels(h), &echo, cfg, h.images), ConfigError);
}

TEST_CASE("mock student halves the offset to the truth") {
  const std::vector<Box> truth{Box{10, 10, 30, 30}};
  const std::vector<Box> pseudo{Box{14, 14, 34, 34, 0.8}};
  const auto once = refine_toward_truth(pseudo, truth, 0.5);
  REQUIRE(once.size() == 1);
  CHECK(once[0].x_min == doctest::Approx(12));
  CHECK(once[0].y_max == doctest::Approx(32));
  CHECK(once[0].score == 0.8);
}

TEST_CASE("refinement contracts toward the truth and fills gaps") {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Box> truth, pseudo;
    for (int i = 0; i < 6; ++i) {
      const double x = 40.0 * i + 5, y = rng.uniform(5, 100);
      truth.push_back(Box{x, y, x + 20, y + 20});
    }
    for (int i = 0; i < 3; ++i) {
      const auto& t = truth[static_cast<std::size_t>(i)];
      const double d = rng.uniform(-5, 5);
      pseudo.push_back(Box{t.x_min + d, t.y_min + d, t.x_max + d, t.y_max + d, 0.7});
    }
    const auto out = refine_toward_truth(pseudo, truth, 0.5);
    REQUIRE(out.size() == 4);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(iou(out[i], truth[i]) >= iou(pseudo[i], truth[i]));
    }
    CHECK(out[3].x_min == truth[3].x_min);
    CHECK(out[3].y_max == truth[3].y_max);
    CHECK(*out[3].score == doctest::Approx(0.7));
  }
  CHECK(refine_toward_truth({}, std::vector<Box>{Box{0, 0, 4, 4}}, 0.5).empty());
}

TEST_CASE("self-training with the mock student improves mAP") {
  Harness h;
  MockStudent student(h.catalog);
  SkdConfig cfg;
  cfg.rounds = 3;
  const auto history = run_schedule(teacher_labels(h), &student, cfg, h.images, &h.truth);
  REQUIRE(history.size() == 4);
  for (std::size_t r = 1; r < history.size(); ++r) {
    CHECK(history[r].metrics->map >= history[r - 1].metrics->map - 1e-9);
    CHECK(*history[r].miou_nearest >= *history[r - 1].miou_nearest - 1e-9);
  }
  CHECK(history[1].metrics->map - history[0].metrics->map >= 0.05);
}

TEST_CASE("mock student errors") {
  Harness h(7, 2, 6);
  MockStudent student(h.catalog);
  PseudoLabelSet empty;
  CHECK_THROWS_AS(student.train(TrainRequest{&empty}), TrainingError);
  CHECK_THROWS_AS(student.predict("nope", h.images[0]), TrainingError);
}
