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

#include <algorithm>
#include <cmath>
#include <map>

#include "attrikit/error.hpp"
#include "attrikit/mock_backends.hpp"
#include "attrikit/prompt.hpp"
#include "support/harness.hpp"

using namespace attrikit;
using testing_support::Harness;

namespace {

AttributeWord shape(const std::string& t, AttributeOrigin o = AttributeOrigin::generated) {
  return AttributeWord::make(t, AttributeKind::shape, o);
}
AttributeWord color(const std::string& t, AttributeOrigin o = AttributeOrigin::generated) {
  return AttributeWord::make(t, AttributeKind::color, o);
}

// Returns one box whose embedding is fixed; the prompt embedding is looked
// up by prompt text, so relevance is chosen by the test.
class TableDetector : public GroundedDetectorBackend {
 public:
  explicit TableDetector(std::map<std::string, EmbeddingVector> table) : table_(std::move(table)) {}
  GroundingResult ground(std::span<const std::string> prompts, const Image&, bool) const override {
    GroundingResult r;
    const auto it = table_.find(prompts.front());
    if (it == table_.end()) return r;
    r.boxes.push_back(Box{0, 0, 4, 4, 0.9});
    r.box_embeddings.push_back({1.0, 0.0});
    r.prompt_embedding = it->second;
    return r;
  }

 private:
  std::map<std::string, EmbeddingVector> table_;
};

class ConstantVqa : public CaptionVqaBackend {
 public:
  explicit ConstantVqa(std::string a) : a_(std::move(a)) {}
  std::string answer(const Raster&, std::string_view) const override { return a_; }

 private:
  std::string a_;
};

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  double s = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    s += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return s / std::sqrt(na * nb);
}

Image blank_image(const std::string& name) { return Image{name, Raster(8, 8)}; }

}  // namespace

TEST_CASE("prompt templates") {
  CHECK(assemble_prompt(shape("slightly round"), color("dark purple"), "nuclei").rendered ==
        "slightly round dark purple nuclei.");
  CHECK(assemble_prompt(shape("circular"), color("purple"), "nuclei").rendered == "circular purple nuclei.");
  CHECK(assemble_prompt(shape("moderately round"), color("violet"), "nuclei").rendered ==
        "moderately round violet nuclei.");
  CHECK(assemble_prompt(std::nullopt, std::nullopt, "nuclei").rendered == "Nuclei.");
  CHECK(assemble_prompt(std::nullopt, color("purple"), "nuclei").rendered == "purple nuclei.");
  CHECK(assemble_prompt(shape("round"), std::nullopt, "nuclei").rendered == "round nuclei.");
  CHECK_THROWS_AS(assemble_prompt(std::nullopt, std::nullopt, "  "), ValidationError);
}

TEST_CASE("attribute words are normalized") {
  CHECK(AttributeWord::make("  Dark Purple ", AttributeKind::color).text == "dark purple");
  CHECK_THROWS_AS(AttributeWord::make("   ", AttributeKind::color), ValidationError);
}

TEST_CASE("lexicon keeps set semantics per kind") {
  AttributeLexicon lex;
  CHECK(lex.add(shape("round")));
  CHECK_FALSE(lex.add(shape("round", AttributeOrigin::synonym_aug)));
  CHECK(lex.add(color("round")));
  CHECK(lex.contains(AttributeKind::shape, "round"));
  CHECK_FALSE(lex.contains(AttributeKind::shape, "purple"));
  lex.shapes.push_back(shape("round"));
  CHECK_THROWS_AS(lex.validate(), ValidationError);
}

TEST_CASE("normalize_answer") {
  CHECK(normalize_answer("Purple.") == "purple");
  CHECK(normalize_answer("The nucleus is round, with ...") == "nucleus is round");
  CHECK(normalize_answer("a dark purple") == "dark purple");
  CHECK(normalize_answer("round and purple") == "round");
  CHECK(normalize_answer("...") == "");
  CHECK(normalize_answer("  Oval-shaped!") == "oval-shaped");
}

TEST_CASE("clean_word_list strips list decoration") {
  const std::vector<std::string> raw{"1. Violet", "2) plum", "- violet", "* Lilac.", "", "purple", "\"mauve\""};
  CHECK(clean_word_list(raw, "Purple") == std::vector<std::string>{"violet", "plum", "lilac", "mauve"});
}

TEST_CASE("augmentation with the dictionary language model") {
  AttributeLexicon lex;
  lex.add(shape("round"));
  lex.add(color("purple"));
  MockLanguage lm;

  const auto full = augment_lexicon(lex, lm);
  CHECK(full.contains(AttributeKind::shape, "circular"));
  CHECK(full.contains(AttributeKind::shape, "slightly round"));
  CHECK(full.contains(AttributeKind::color, "violet"));
  CHECK(full.contains(AttributeKind::color, "dark purple"));
  CHECK(full.shapes.front() == lex.shapes.front());
  for (const auto& w : full.shapes) {
    if (w.text == "circular") CHECK(w.origin == AttributeOrigin::synonym_aug);
    if (w.text == "moderately round") CHECK(w.origin == AttributeOrigin::degree_aug);
  }
  CHECK_NOTHROW(full.validate());

  const auto syn = augment_lexicon(lex, lm, {true, false});
  CHECK(syn.contains(AttributeKind::color, "violet"));
  CHECK_FALSE(syn.contains(AttributeKind::color, "dark purple"));
  const auto deg = augment_lexicon(lex, lm, {false, true});
  CHECK_FALSE(deg.contains(AttributeKind::color, "violet"));
  CHECK(deg.contains(AttributeKind::color, "dark purple"));
  CHECK(augment_lexicon(lex, lm, {false, false}) == lex);

  // Augmenting twice adds nothing new.
  CHECK(augment_lexicon(full, lm) == full);
}

TEST_CASE("mock language answers are case insensitive") {
  MockLanguage lm;
  CHECK(lm.word_list(synonym_query("Purple")) == MockLanguage::synonyms().at("purple"));
  CHECK(lm.word_list(degree_query("ROUND")) == MockLanguage::degrees().at("round"));
  CHECK(lm.word_list("tell me a joke").empty());
  CHECK(lm.word_list(synonym_query("elongated")).empty());
}

TEST_CASE("candidate prompts follow the ablation mode") {
  AttributeLexicon lex;
  lex.add(shape("round"));
  lex.add(shape("elongated"));
  lex.add(color("purple"));
  CHECK(candidate_prompts(lex, AblationMode::full).size() == 2);
  CHECK(candidate_prompts(lex, AblationMode::shape_only).size() == 2);
  CHECK(candidate_prompts(lex, AblationMode::color_only).size() == 1);
  const auto noun = candidate_prompts(lex, AblationMode::noun_only);
  REQUIRE(noun.size() == 1);
  CHECK(noun[0].rendered == "Nuclei.");
  CHECK(ablation_mode_from_string("color_only") == AblationMode::color_only);
  CHECK_THROWS_AS(ablation_mode_from_string("everything"), ConfigError);
}

TEST_CASE("mean_relevance matches a double loop over images and boxes") {
  Harness h(3, 6, 10);
  MockGroundedDetector det(h.catalog);
  for (const auto& text : {"slightly round dark purple nuclei.", "elongated violet nuclei.", "Nuclei."}) {
    Prompt p;
    p.noun = "nuclei";
    p.rendered = text;
    const auto r = mean_relevance(p, h.images, det);

    double outer = 0.0;
    int used = 0;
    for (const auto& img : h.images) {
      const std::vector<std::string> seq{text};
      const auto g = det.ground(seq, img, true);
      if (g.boxes.empty()) continue;
      double inner = 0.0;
      for (const auto& e : g.box_embeddings) inner += dot(e, *g.prompt_embedding);
      outer += inner / static_cast<double>(g.boxes.size());
      ++used;
    }
    CHECK(std::abs(r.relevance - outer / used) <= 1e-12);
    CHECK(r.n_images == used);
    CHECK(r.n_images + r.n_skipped == static_cast<int>(h.images.size()));

    auto shuffled = h.images;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(mean_relevance(p, shuffled, det).relevance == r.relevance);
  }
}

TEST_CASE("relevance skips images without candidates") {
  const TableDetector det({{"a nuclei.", {1.0, 0.0}}});
  Prompt p;
  p.noun = "nuclei";
  p.rendered = "b nuclei.";
  const std::vector<Image> images{blank_image("x")};
  CHECK_THROWS_AS(mean_relevance(p, images, det), ValidationError);
}

TEST_CASE("sequence is sorted, truncated to N and tie-broken by text") {
  const double s = std::sqrt(0.5);
  const TableDetector det({{"a x.", {1.0, 0.0}},
                           {"b x.", {s, s}},
                           {"c x.", {s, s}},
                           {"d x.", {0.0, 1.0}},
                           {"e x.", {-1.0, 0.0}}});
  AttributeLexicon lex;
  lex.nouns = {"x"};
  for (const char* w : {"e", "c", "a", "d", "b"}) lex.add(shape(w));
  const std::vector<Image> images{blank_image("i0"), blank_image("i1")};

  const auto seq = build_prompt_sequence(lex, images, det, 3, AblationMode::shape_only);
  CHECK(seq.prompts() == std::vector<std::string>{"a x.", "b x.", "c x."});
  CHECK(seq.joined() == "a x. b x. c x.");
  CHECK(seq.entries[0].relevance == doctest::Approx(1.0));
  CHECK_NOTHROW(seq.validate());

  const auto all = build_prompt_sequence(lex, images, det, 9, AblationMode::shape_only);
  CHECK(all.entries.size() == 5);
  CHECK(all.entries.back().prompt.rendered == "e x.");
  CHECK(all.entries.back().relevance == doctest::Approx(-1.0));

  CHECK_THROWS_AS(build_prompt_sequence(lex, images, det, 0, AblationMode::shape_only), ValidationError);
}

TEST_CASE("default sequence length is nine") {
  CHECK(kDefaultTopN == 9);
  Harness h(11, 5, 12);
  MockGroundedDetector det(h.catalog);
  MockLanguage lm;
  AttributeLexicon lex;
  lex.add(shape("round"));
  lex.add(shape("elongated"));
  lex.add(color("purple"));
  const auto seq = build_prompt_sequence(augment_lexicon(lex, lm), h.images, det);
  CHECK(seq.n_selected == 9);
  CHECK(seq.entries.size() == 9);
  for (std::size_t i = 1; i < seq.entries.size(); ++i) {
    CHECK(seq.entries[i - 1].relevance >= seq.entries[i].relevance);
  }
  const auto back = prompt_sequence_from_json(Json::parse(dump_canonical(to_json(seq))));
  CHECK(back.prompts() == seq.prompts());
}

TEST_CASE("sequence validation") {
  PromptSequence seq;
  seq.n_selected = 1;
  RelevanceReport r;
  r.prompt = assemble_prompt(std::nullopt, std::nullopt, "nuclei");
  r.relevance = 0.2;
  r.n_images = 1;
  seq.entries = {r, r};
  CHECK_THROWS_AS(seq.validate(), ValidationError);
  seq.n_selected = 2;
  seq.entries[1].relevance = 0.5;
  CHECK_THROWS_AS(seq.validate(), ValidationError);
}

TEST_CASE("attribute generation on all-round scenes") {
  SynthSpec spec;
  spec.seed = 5;
  spec.count = 6;
  spec.elongated_fraction = 0.0;
  const auto scenes = generate_scenes(spec);
  auto catalog = std::make_shared<SceneCatalog>();
  std::vector<Image> images;
  for (const auto& s : scenes) {
    catalog->add(s);
    images.push_back({s.name, s.raster});
  }
  MockGroundedDetector det(catalog);
  MockVqa vqa;
  const auto lex = generate_attributes(images, {"nuclei"}, det, vqa);
  REQUIRE(lex.shapes.size() == 1);
  REQUIRE(lex.colors.size() == 1);
  CHECK(lex.shapes[0].text == "round");
  CHECK(lex.colors[0].text == "purple");
  CHECK(lex.nouns == std::vector<std::string>{"nuclei"});
}

TEST_CASE("attribute generation with default scenes finds both shapes") {
  Harness h;
  MockGroundedDetector det(h.catalog);
  MockVqa vqa;
  const auto lex = generate_attributes(h.images, {"nuclei"}, det, vqa);
  CHECK(lex.contains(AttributeKind::shape, "round"));
  CHECK(lex.contains(AttributeKind::shape, "elongated"));
  CHECK(lex.shapes.front().text == "round");
  CHECK(lex.contains(AttributeKind::color, "purple"));
  CHECK(generate_attributes(h.images, {"nuclei"}, det, vqa, 1).shapes.size() == 1);
}

TEST_CASE("attribute generation with a constant answer") {
  Harness h(2, 3, 8);
  MockGroundedDetector det(h.catalog);
  const auto lex = generate_attributes(h.images, {"nuclei"}, det, ConstantVqa("Blue."));
  REQUIRE(lex.shapes.size() == 1);
  CHECK(lex.shapes[0].text == "blue");
  CHECK(lex.colors[0].text == "blue");
  CHECK_THROWS_AS(generate_attributes(h.images, {"nuclei"}, det, ConstantVqa("?!")), EmptyLexiconError);
}

TEST_CASE("an empty lexicon cannot produce prompts") {
  AttributeLexicon lex;
  const std::vector<Image> images{blank_image("x")};
  const TableDetector det({});
  CHECK_THROWS_AS(build_prompt_sequence(lex, images, det), EmptyLexiconError);
  CHECK_THROWS_AS(generate_attributes(images, {"nuclei"}, det, ConstantVqa("round")), EmptyLexiconError);
}

TEST_CASE("lexicon json round trip") {
  AttributeLexicon lex;
  lex.add(shape("round"));
  lex.add(shape("slightly round", AttributeOrigin::degree_aug));
  lex.add(color("violet", AttributeOrigin::synonym_aug));
  CHECK(lexicon_from_json(Json::parse(dump_canonical(to_json(lex)))) == lex);
}
