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
#include "attrikit/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "attrikit/error.hpp"
#include "attrikit/parallel.hpp"

namespace attrikit {

const char* to_string(AttributeKind kind) {
  return kind == AttributeKind::shape ? "shape" : "color";
}

const char* to_string(AttributeOrigin origin) {
  switch (origin) {
    case AttributeOrigin::generated: return "generated";
    case AttributeOrigin::synonym_aug: return "synonym_aug";
    case AttributeOrigin::degree_aug: return "degree_aug";
  }
  return "generated";
}

namespace {

AttributeKind kind_from_string(const std::string& s) {
  if (s == "shape") return AttributeKind::shape;
  if (s == "color") return AttributeKind::color;
  throw ParseError("unknown attribute kind '" + s + "'");
}

AttributeOrigin origin_from_string(const std::string& s) {
  if (s == "generated") return AttributeOrigin::generated;
  if (s == "synonym_aug") return AttributeOrigin::synonym_aug;
  if (s == "degree_aug") return AttributeOrigin::degree_aug;
  throw ParseError("unknown attribute origin '" + s + "'");
}

std::string collapse_spaces(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::string tok, out;
  while (in >> tok) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

}  // namespace

AttributeWord AttributeWord::make(std::string_view text, AttributeKind kind,
                                  AttributeOrigin origin) {
  std::string t = collapse_spaces(to_lower(text));
  if (t.empty()) throw ValidationError("attribute word must be non-empty");
  return AttributeWord{std::move(t), kind, origin};
}

const std::vector<AttributeWord>& AttributeLexicon::words(AttributeKind kind) const {
  return kind == AttributeKind::shape ? shapes : colors;
}

bool AttributeLexicon::contains(AttributeKind kind, std::string_view text) const {
  const auto& ws = words(kind);
  return std::any_of(ws.begin(), ws.end(), [&](const AttributeWord& w) { return w.text == text; });
}

bool AttributeLexicon::add(const AttributeWord& word) {
  if (contains(word.kind, word.text)) return false;
  (word.kind == AttributeKind::shape ? shapes : colors).push_back(word);
  return true;
}

void AttributeLexicon::validate() const {
  if (nouns.empty()) throw ValidationError("lexicon needs at least one noun");
  for (const auto& n : nouns) {
    if (trim(n).empty()) throw ValidationError("lexicon noun must be non-empty");
  }
  for (auto kind : {AttributeKind::shape, AttributeKind::color}) {
    std::set<std::string> seen;
    for (const auto& w : words(kind)) {
      if (w.text.empty()) throw ValidationError("empty attribute word");
      if (w.kind != kind) throw ValidationError("attribute '" + w.text + "' filed under the wrong kind");
      if (!seen.insert(w.text).second) {
        throw ValidationError("duplicate " + std::string(to_string(kind)) + " '" + w.text + "'");
      }
    }
  }
}

Prompt assemble_prompt(const std::optional<AttributeWord>& shape,
                       const std::optional<AttributeWord>& color,
                       std::string_view noun) {
  std::string n = collapse_spaces(noun);
  if (n.empty()) throw ValidationError("prompt noun must be non-empty");
  std::string rendered;
  if (shape) rendered += shape->text + " ";
  if (color) rendered += color->text + " ";
  const bool bare = rendered.empty();
  rendered += n + ".";
  if (bare) {
    rendered[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rendered[0])));
  }
  return Prompt{shape, color, std::move(n), std::move(rendered)};
}

std::vector<std::string> PromptSequence::prompts() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.prompt.rendered);
  return out;
}

std::string PromptSequence::joined() const {
  std::string out;
  for (const auto& e : entries) {
    if (!out.empty()) out += ' ';
    out += e.prompt.rendered;
  }
  return out;
}

void PromptSequence::validate() const {
  if (n_selected < 1) throw ValidationError("prompt sequence needs N >= 1");
  if (static_cast<int>(entries.size()) > n_selected) {
    throw ValidationError("prompt sequence longer than N");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.relevance < -1.0 || e.relevance > 1.0) throw ValidationError("relevance outside [-1,1]");
    if (e.n_images < 1) throw ValidationError("relevance averaged over no images");
    if (i > 0 && entries[i - 1].relevance < e.relevance) {
      throw ValidationError("prompt sequence not sorted by relevance");
    }
  }
}

AblationMode ablation_mode_from_string(const std::string& s) {
  if (s == "full") return AblationMode::full;
  if (s == "shape_only") return AblationMode::shape_only;
  if (s == "color_only") return AblationMode::color_only;
  if (s == "noun_only") return AblationMode::noun_only;
  throw ConfigError("unknown ablation mode '" + s + "'");
}

// --- attribute generation ---------------------------------------------------

std::string normalize_answer(std::string_view answer) {
  std::string lowered = to_lower(answer);
  // Keep the first clause only.
  const auto cut = lowered.find_first_of(",.;:!?\n");
  if (cut != std::string::npos) lowered.resize(cut);
  for (auto& c : lowered) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = ' ';
  }
  static const std::set<std::string> kArticles{"a", "an", "the"};
  std::istringstream in(lowered);
  std::string tok, out;
  while (in >> tok) {
    if (tok == "and" || tok == "or") break;
    if (kArticles.count(tok)) continue;
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

namespace {

struct PatchAnswers {
  std::vector<std::string> colors;
  std::vector<std::string> shapes;
  std::size_t boxes = 0;
};

std::vector<AttributeWord> top_words(const std::map<std::string, int>& tally,
                                     AttributeKind kind, int top_k) {
  std::vector<std::pair<std::string, int>> ranked(tally.begin(), tally.end());
  // std::map iteration is already lexicographic; stable_sort keeps that on ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& l, const auto& r) { return l.second > r.second; });
  std::vector<AttributeWord> out;
  for (const auto& [text, count] : ranked) {
    if (static_cast<int>(out.size()) == top_k) break;
    out.push_back(AttributeWord::make(text, kind, AttributeOrigin::generated));
  }
  return out;
}

}  // namespace

AttributeLexicon generate_attributes(std::span<const Image> images,
                                     const std::vector<std::string>& nouns,
                                     const GroundedDetectorBackend& detector,
                                     const CaptionVqaBackend& vqa, int top_k) {
  if (images.empty()) throw ValidationError("attribute generation needs at least one image");
  if (nouns.empty()) throw ValidationError("attribute generation needs at least one noun");
  if (top_k < 1) throw ValidationError("top_k must be >= 1");

  std::vector<std::string> coarse;
  for (const auto& n : nouns) coarse.push_back(assemble_prompt(std::nullopt, std::nullopt, n).rendered);
  const std::string color_q = color_question(nouns.front());
  const std::string shape_q = shape_question(nouns.front());

  const auto per_image = parallel_map(images.size(), [&](std::size_t i) {
    const Image& image = images[i];
    PatchAnswers out;
    try {
      const GroundingResult g = detector.ground(coarse, image, false);
      for (const auto& box : g.boxes) {
        const auto rect = clip_to_image(box, image.raster.size());
        if (!rect) continue;
        const Raster patch = image.raster.crop(*rect);
        ++out.boxes;
        out.colors.push_back(normalize_answer(vqa.answer(patch, color_q)));
        out.shapes.push_back(normalize_answer(vqa.answer(patch, shape_q)));
      }
    } catch (const BackendError& e) {
      throw TransportError(e.what(), image.name);
    }
    return out;
  });

  std::map<std::string, int> color_tally, shape_tally;
  std::size_t total = 0;
  for (const auto& r : per_image) {
    total += r.boxes;
    for (const auto& c : r.colors) if (!c.empty()) ++color_tally[c];
    for (const auto& s : r.shapes) if (!s.empty()) ++shape_tally[s];
  }
  if (total == 0) throw EmptyLexiconError("coarse detection found no objects in any image");
  if (color_tally.empty() && shape_tally.empty()) {
    throw EmptyLexiconError("VQA produced no usable attribute words");
  }

  AttributeLexicon lex;
  lex.nouns = nouns;
  lex.shapes = top_words(shape_tally, AttributeKind::shape, top_k);
  lex.colors = top_words(color_tally, AttributeKind::color, top_k);
  return lex;
}

// --- augmentation -----------------------------------------------------------

std::vector<std::string> clean_word_list(const std::vector<std::string>& raw,
                                         std::string_view exclude) {
  const std::string excluded = collapse_spaces(to_lower(exclude));
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& entry : raw) {
    std::string w = trim(entry);
    // List markers: "1.", "2)", "-", "*", bullets.
    std::size_t i = 0;
    while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) ++i;
    if (i > 0 && i < w.size() && (w[i] == '.' || w[i] == ')')) w.erase(0, i + 1);
    while (!w.empty() && (w[0] == '-' || w[0] == '*' || w[0] == '"' || w[0] == '\'' ||
                          std::isspace(static_cast<unsigned char>(w[0])))) {
      w.erase(0, 1);
    }
    while (!w.empty() && std::string_view(".,;:!?\"'").find(w.back()) != std::string_view::npos) {
      w.pop_back();
    }
    w = collapse_spaces(to_lower(w));
    if (w.empty() || w == excluded) continue;
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

namespace {

std::vector<AttributeWord> augment_with(const AttributeWord& word,
                                        const LanguageBackend& lm,
                                        const std::string& query,
                                        AttributeOrigin origin) {
  std::vector<std::string> raw;
  try {
    raw = lm.word_list(query);
  } catch (const BackendError& e) {
    throw TransportError(std::string("augmenting '") + word.text + "': " + e.what());
  }
  std::vector<AttributeWord> out;
  for (const auto& w : clean_word_list(raw, word.text)) {
    out.push_back(AttributeWord::make(w, word.kind, origin));
  }
  return out;
}

}  // namespace

std::vector<AttributeWord> synonym_augment(const AttributeWord& word,
                                           const LanguageBackend& lm) {
  return augment_with(word, lm, synonym_query(word.text), AttributeOrigin::synonym_aug);
}

std::vector<AttributeWord> degree_augment(const AttributeWord& word,
                                          const LanguageBackend& lm) {
  return augment_with(word, lm, degree_query(word.text), AttributeOrigin::degree_aug);
}

AttributeLexicon augment_lexicon(const AttributeLexicon& lexicon,
                                 const LanguageBackend& lm, AugmentOptions options) {
  AttributeLexicon out = lexicon;
  for (auto kind : {AttributeKind::shape, AttributeKind::color}) {
    std::vector<AttributeWord> seeds;
    for (const auto& w : lexicon.words(kind)) {
      if (w.origin == AttributeOrigin::generated) seeds.push_back(w);
    }
    std::vector<AttributeWord> bases = seeds;
    if (options.synonyms) {
      for (const auto& seed : seeds) {
        for (const auto& syn : synonym_augment(seed, lm)) {
          if (out.add(syn)) bases.push_back(syn);
        }
      }
    }
    if (options.degrees) {
      for (const auto& base : bases) {
        for (const auto& deg : degree_augment(base, lm)) out.add(deg);
      }
    }
  }
  return out;
}

// --- relevance sorting ------------------------------------------------------

namespace {

struct ImageRelevance {
  bool has_boxes = false;
  double mean_cosine = 0.0;
};

}  // namespace

RelevanceReport mean_relevance(const Prompt& prompt, std::span<const Image> images,
                               const GroundedDetectorBackend& detector) {
  if (images.empty()) throw ValidationError("relevance needs at least one image");
  const std::vector<std::string> seq{prompt.rendered};

  const auto per_image = parallel_map(images.size(), [&](std::size_t i) {
    GroundingResult g;
    try {
      g = detector.ground(seq, images[i], true);
    } catch (const BackendError& e) {
      throw TransportError(e.what(), images[i].name);
    }
    ImageRelevance r;
    if (g.boxes.empty()) return r;
    if (!g.prompt_embedding || g.box_embeddings.size() != g.boxes.size()) {
      throw SchemaError("detector returned boxes without matching embeddings for " +
                        images[i].name);
    }
    double sum = 0.0;
    for (const auto& emb : g.box_embeddings) sum += cosine(emb, *g.prompt_embedding);
    r.has_boxes = true;
    r.mean_cosine = sum / static_cast<double>(g.box_embeddings.size());
    return r;
  });

  // Summing in sorted order makes the result independent of image order.
  std::vector<double> values;
  for (const auto& r : per_image) {
    if (r.has_boxes) values.push_back(r.mean_cosine);
  }
  if (values.empty()) {
    throw ValidationError("no image yielded candidate boxes for '" + prompt.rendered + "'");
  }
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;

  RelevanceReport report;
  report.prompt = prompt;
  report.n_images = static_cast<int>(values.size());
  report.n_skipped = static_cast<int>(images.size() - values.size());
  report.relevance = std::clamp(sum / static_cast<double>(values.size()), -1.0, 1.0);
  return report;
}

std::vector<Prompt> candidate_prompts(const AttributeLexicon& lexicon, AblationMode mode) {
  lexicon.validate();
  std::vector<Prompt> out;
  for (const auto& noun : lexicon.nouns) {
    switch (mode) {
      case AblationMode::full:
        for (const auto& s : lexicon.shapes)
          for (const auto& c : lexicon.colors) out.push_back(assemble_prompt(s, c, noun));
        break;
      case AblationMode::shape_only:
        for (const auto& s : lexicon.shapes) out.push_back(assemble_prompt(s, std::nullopt, noun));
        break;
      case AblationMode::color_only:
        for (const auto& c : lexicon.colors) out.push_back(assemble_prompt(std::nullopt, c, noun));
        break;
      case AblationMode::noun_only:
        out.push_back(assemble_prompt(std::nullopt, std::nullopt, noun));
        break;
    }
  }
  return out;
}

PromptSequence build_prompt_sequence(const AttributeLexicon& lexicon,
                                     std::span<const Image> images,
                                     const GroundedDetectorBackend& detector, int n,
                                     AblationMode mode) {
  if (n < 1) throw ValidationError("N must be >= 1");
  const auto candidates = candidate_prompts(lexicon, mode);
  if (candidates.empty()) throw EmptyLexiconError("lexicon yields no candidate prompts");

  std::vector<RelevanceReport> scored;
  for (const auto& p : candidates) {
    try {
      scored.push_back(mean_relevance(p, images, detector));
    } catch (const ValidationError&) {
      // No candidate boxes anywhere: the prompt cannot be ranked.
    }
  }
  if (scored.empty()) throw ValidationError("no candidate prompt produced any detections");

  std::sort(scored.begin(), scored.end(), [](const RelevanceReport& l, const RelevanceReport& r) {
    if (l.relevance != r.relevance) return l.relevance > r.relevance;
    return l.prompt.rendered < r.prompt.rendered;
  });
  if (static_cast<int>(scored.size()) > n) scored.resize(n);
  return PromptSequence{std::move(scored), n};
}

// --- serialization ----------------------------------------------------------

Json to_json(const AttributeWord& word) {
  return {{"text", word.text}, {"kind", to_string(word.kind)}, {"origin", to_string(word.origin)}};
}

Json to_json(const AttributeLexicon& lexicon) {
  Json shapes = Json::array(), colors = Json::array();
  for (const auto& w : lexicon.shapes) shapes.push_back(to_json(w));
  for (const auto& w : lexicon.colors) colors.push_back(to_json(w));
  return {{"shapes", shapes}, {"colors", colors}, {"nouns", lexicon.nouns}};
}

Json to_json(const Prompt& prompt) {
  return {{"shape", prompt.shape ? to_json(*prompt.shape) : Json(nullptr)},
          {"color", prompt.color ? to_json(*prompt.color) : Json(nullptr)},
          {"noun", prompt.noun},
          {"rendered", prompt.rendered}};
}

Json to_json(const PromptSequence& sequence) {
  Json entries = Json::array();
  for (const auto& e : sequence.entries) {
    entries.push_back({{"prompt", to_json(e.prompt)},
                       {"relevance", e.relevance},
                       {"n_images", e.n_images},
                       {"n_skipped", e.n_skipped}});
  }
  return {{"n_selected", sequence.n_selected},
          {"entries", entries},
          {"sequence", sequence.joined()}};
}

namespace {

AttributeWord word_from_json(const Json& j) {
  return AttributeWord::make(j.at("text").get<std::string>(),
                             kind_from_string(j.at("kind").get<std::string>()),
                             origin_from_string(j.at("origin").get<std::string>()));
}

std::optional<AttributeWord> optional_word(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return word_from_json(j.at(key));
}

}  // namespace

AttributeLexicon lexicon_from_json(const Json& j) {
  try {
    AttributeLexicon lex;
    lex.nouns = j.at("nouns").get<std::vector<std::string>>();
    for (const auto& w : j.at("shapes")) lex.shapes.push_back(word_from_json(w));
    for (const auto& w : j.at("colors")) lex.colors.push_back(word_from_json(w));
    lex.validate();
    return lex;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("lexicon: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(std::string("lexicon: ") + e.what());
  }
}

PromptSequence prompt_sequence_from_json(const Json& j) {
  try {
    PromptSequence seq;
    seq.n_selected = j.at("n_selected").get<int>();
    for (const auto& e : j.at("entries")) {
      const Json& p = e.at("prompt");
      Prompt prompt = assemble_prompt(optional_word(p, "shape"), optional_word(p, "color"),
                                      p.at("noun").get<std::string>());
      if (prompt.rendered != p.at("rendered").get<std::string>()) {
        throw ParseError("prompt sequence: rendered text '" + p.at("rendered").get<std::string>() +
                         "' does not match its parts");
      }
      seq.entries.push_back({std::move(prompt), e.at("relevance").get<double>(),
                             e.at("n_images").get<int>(), e.value("n_skipped", 0)});
    }
    seq.validate();
    return seq;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("prompt sequence: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(std::string("prompt sequence: ") + e.what());
  }
}

}  // namespace attrikit
