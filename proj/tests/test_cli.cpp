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

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "attrikit/app.hpp"
#include "attrikit/error.hpp"
#include "attrikit/labels.hpp"
#include "support/harness.hpp"
#include "support/mock_gateway.hpp"

using namespace attrikit;
using testing_support::scratch_dir;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return out;
}

// synth, prompt, detect and distill into `root`.
void pipeline(const fs::path& root, const std::vector<std::string>& extra = {}) {
  const std::string data = (root / "data").string();
  auto with = [&](std::vector<std::string> args) {
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  const auto s = cli({"--seed", "7", "--out", data, "synth", "--count", "6", "--objects", "12"});
  REQUIRE_MESSAGE(s.code == 0, s.err);
  const auto p = cli(with({"--dataset", data, "--out", (root / "prompt").string(), "prompt"}));
  REQUIRE_MESSAGE(p.code == 0, p.err);
  const std::string seq = (root / "prompt" / "prompt_sequence.json").string();
  const auto d = cli(with({"--dataset", data, "--out", (root / "detect").string(), "detect", "--prompts", seq}));
  REQUIRE_MESSAGE(d.code == 0, d.err);
  const auto k = cli(with({"--dataset", data, "--out", (root / "distill").string(), "--rounds", "2", "distill",
                           "--pseudo", (root / "detect" / "pseudo_labels.json").string()}));
  REQUIRE_MESSAGE(k.code == 0, k.err);
}

}  // namespace

TEST_CASE("exit codes by category") {
  CHECK(exit_code_for(ErrorCategory::config) == 2);
  CHECK(exit_code_for(ErrorCategory::backend) == 3);
  CHECK(exit_code_for(ErrorCategory::data) == 4);
}

TEST_CASE("full pipeline writes the documented files") {
  const auto root = scratch_dir("cli_pipeline");
  pipeline(root);
  CHECK(fs::exists(root / "data" / "annotations.json"));
  CHECK(fs::exists(root / "data" / "scenes.json"));
  CHECK(fs::exists(root / "prompt" / "lexicon.json"));
  CHECK(fs::exists(root / "prompt" / "relevance_table.md"));
  CHECK(fs::exists(root / "detect" / "pseudo_labels.json"));
  CHECK(fs::is_directory(root / "detect" / "overlays"));
  for (int r = 0; r <= 2; ++r) {
    CHECK(fs::exists(root / "distill" / "rounds" / ("round_" + std::to_string(r)) / "pseudo_labels.json"));
  }
  CHECK_FALSE(fs::exists(root / "distill" / "rounds" / "round_3"));

  const Json seq = read_json(root / "prompt" / "prompt_sequence.json");
  CHECK(seq.at("entries").size() == 9);

  const auto truth = (root / "data" / "annotations.json").string();
  const auto e = cli({"--out", (root / "eval").string(), "eval", "--preds",
                      (root / "distill" / "rounds" / "round_2" / "pseudo_labels.json").string(), "--truth", truth});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  const Json m = read_json(root / "eval" / "metrics.json");
  CHECK(m.at("map").get<double>() > 0.5);
  CHECK(m.contains("miou_nearest"));
  CHECK(e.out.find("mAP") != std::string::npos);
}

TEST_CASE("fixed seeds give byte-identical output trees") {
  const auto a = scratch_dir("cli_det_a");
  const auto b = scratch_dir("cli_det_b");
  pipeline(a);
  pipeline(b);
  const auto ta = read_tree(a), tb = read_tree(b);
  CHECK(ta.size() > 20);
  CHECK(ta == tb);
}

TEST_CASE("distill resumes from saved rounds") {
  const auto root = scratch_dir("cli_resume");
  pipeline(root);
  const std::string data = (root / "data").string();
  const std::string pseudo = (root / "detect" / "pseudo_labels.json").string();
  const auto full = cli({"--dataset", data, "--out", (root / "full").string(), "--rounds", "3", "distill",
                         "--pseudo", pseudo});
  REQUIRE(full.code == 0);
  const auto part = cli({"--dataset", data, "--out", (root / "part").string(), "--rounds", "1", "distill",
                         "--pseudo", pseudo});
  REQUIRE(part.code == 0);
  const auto resumed = cli({"--dataset", data, "--out", (root / "part").string(), "--rounds", "3", "distill",
                            "--pseudo", pseudo, "--resume"});
  REQUIRE_MESSAGE(resumed.code == 0, resumed.err);
  CHECK(read_tree(root / "full") == read_tree(root / "part"));
}

TEST_CASE("distill can start from prompts") {
  const auto root = scratch_dir("cli_distill_prompts");
  pipeline(root);
  const auto r = cli({"--dataset", (root / "data").string(), "--out", (root / "d2").string(), "--rounds", "1",
                      "distill", "--prompts", (root / "prompt" / "prompt_sequence.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(read_file(root / "d2" / "rounds" / "round_0" / "pseudo_labels.json") ==
        read_file(root / "detect" / "pseudo_labels.json"));
}

TEST_CASE("config files and their errors") {
  const auto root = scratch_dir("cli_config");
  const auto data = (root / "data").string();
  REQUIRE(cli({"--out", data, "synth", "--count", "2", "--size", "96x80", "--objects", "4"}).code == 0);
  CHECK(load_coco(root / "data" / "annotations.json").images[0].size == ImageSize{96, 80});

  write_file(root / "good.json", R"({"dataset": ")" + data + R"(", "top_n": 2, "augment": {"synonyms": false},
    "lexicon": {"shapes": [{"text": "round", "kind": "shape", "origin": "generated"}],
                "colors": [{"text": "purple", "kind": "color", "origin": "generated"}],
                "nouns": ["nuclei"]}})");
  const auto ok = cli({"--config", (root / "good.json").string(), "--out", (root / "p").string(), "prompt"});
  REQUIRE_MESSAGE(ok.code == 0, ok.err);
  const Json lex = read_json(root / "p" / "lexicon.json");
  CHECK(lex.at("shapes").size() == 4);  // round plus its three degree variants
  CHECK(read_json(root / "p" / "prompt_sequence.json").at("entries").size() == 2);

  write_file(root / "typo.json", R"({"roundz": 3})");
  CHECK(cli({"--config", (root / "typo.json").string(), "synth"}).code == 2);
  write_file(root / "broken.json", "{");
  CHECK(cli({"--config", (root / "broken.json").string(), "synth"}).code == 2);
  CHECK(cli({"--config", (root / "missing.json").string(), "synth"}).code == 2);
}

TEST_CASE("usage and input errors map to exit codes") {
  const auto root = scratch_dir("cli_errors");
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--backend", "cloud", "synth"}).code == 2);
  CHECK(cli({"--rounds", "0", "synth"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--dataset", (root / "nothing").string(), "prompt"}).code == 2);
  CHECK(cli({"--dataset", (root / "nothing").string(), "distill"}).code == 2);
  CHECK(cli({"--out", (root / "e").string(), "eval", "--preds", "x.json", "--truth", "y.json"}).code == 2);

  const auto data = (root / "data").string();
  REQUIRE(cli({"--out", data, "synth", "--count", "2", "--objects", "4"}).code == 0);
  write_file(root / "bad_prompts.json", R"([1, 2])");
  CHECK(cli({"--dataset", data, "--out", (root / "d").string(), "detect", "--prompts",
             (root / "bad_prompts.json").string()}).code == 4);
  write_file(root / "empty_prompts.json", "[]");
  CHECK(cli({"--dataset", data, "--out", (root / "d").string(), "detect", "--prompts",
             (root / "empty_prompts.json").string()}).code == 4);
  CHECK(cli({"--backend", "remote", "--endpoint", "", "--dataset", data, "prompt"}).code == 2);
  CHECK(cli({"--backend", "remote", "--endpoint", "http://127.0.0.1:9", "--dataset", data, "--out",
             (root / "r").string(), "prompt"}).code == 3);
}

TEST_CASE("eval accepts a results array") {
  const auto root = scratch_dir("cli_eval_results");
  Dataset truth;
  truth.images.push_back(AnnotatedImage{1, "a.ppm", {100, 100}, {Box{0, 0, 10, 10}}, std::nullopt});
  save_coco(truth, root / "truth.json");
  write_file(root / "preds.json", R"([{"image_id": 1, "category_id": 1, "bbox": [0, 0, 10, 8], "score": 0.9}])");
  const auto r = cli({"--out", (root / "o").string(), "eval", "--preds", (root / "preds.json").string(), "--truth",
                      (root / "truth.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const Json m = read_json(root / "o" / "metrics.json");
  CHECK(m.at("map").get<double>() == doctest::Approx(0.7));
  CHECK(m.at("ap50").get<double>() == 1.0);
  CHECK(m.at("ar").get<double>() == doctest::Approx(0.7));
}

TEST_CASE("the remote backend produces the same files as the mock") {
  const auto root = scratch_dir("cli_remote");
  pipeline(root);

  // The gateway sees exactly what the mock backends read from disk.
  auto catalog = std::make_shared<SceneCatalog>(SceneCatalog::from_json(read_json(root / "data" / "scenes.json")));
  const DirectoryImageProvider provider(root / "data" / "images");
  const auto images = load_images(load_coco(root / "data" / "annotations.json"), provider);
  testing_support::MockGateway gw(catalog, images);

  write_file(root / "remote.json", R"({"backend": "remote", "endpoint_options": {"poll_interval_s": 0.01}})");
  ::setenv("ATTRIKIT_ENDPOINT", gw.url().c_str(), 1);
  const auto remote_root = root / "remote";
  fs::create_directories(remote_root);
  fs::copy(root / "data", remote_root / "data", fs::copy_options::recursive);
  {
    const std::string data = (remote_root / "data").string();
    const std::string cfg = (root / "remote.json").string();
    REQUIRE(cli({"--config", cfg, "--dataset", data, "--out", (remote_root / "prompt").string(), "prompt"}).code == 0);
    REQUIRE(cli({"--config", cfg, "--dataset", data, "--out", (remote_root / "detect").string(), "detect",
                 "--prompts", (remote_root / "prompt" / "prompt_sequence.json").string()})
                .code == 0);
    const auto k = cli({"--config", cfg, "--dataset", data, "--out", (remote_root / "distill").string(),
                        "--rounds", "2", "distill", "--pseudo",
                        (remote_root / "detect" / "pseudo_labels.json").string()});
    REQUIRE_MESSAGE(k.code == 0, k.err);
  }
  ::unsetenv("ATTRIKIT_ENDPOINT");
  CHECK(gw.calls("ground") > 0);
  CHECK(gw.calls("train") == 2);

  for (const char* f : {"prompt/prompt_sequence.json", "prompt/lexicon.json", "detect/pseudo_labels.json",
                        "distill/rounds/round_2/pseudo_labels.json", "distill/rounds/round_2/metrics.json"}) {
    CAPTURE(f);
    CHECK(read_file(remote_root / f) == read_file(root / f));
  }
}
