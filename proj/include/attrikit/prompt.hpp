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

// Automatic prompt construction for grounded detection:
//
//   1. generate_attributes: coarse-detect with the bare nouns, crop each box
//      and ask the VQA backend for the color and shape of the object; keep
//      the most frequent answers.
//   2. augment_lexicon: extend each attribute with synonyms and with graded
//      variants ("dark purple", "slightly round") from a language backend.
//   3. build_prompt_sequence: render "[shape] [color] [noun]." for every
//      combination, score each by its mean text/box embedding cosine over the
//      training images, and keep the best N in descending order.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrikit/backends.hpp"
#include "attrikit/util.hpp"

namespace attrikit {

inline constexpr int kDefaultAttributeTopK = 3;
inline constexpr int kDefaultTopN = 9;
inline constexpr const char* kDefaultNoun = "nuclei";

enum class AttributeKind { shape, color };
enum class AttributeOrigin { generated, synonym_aug, degree_aug };

const char* to_string(AttributeKind kind);
const char* to_string(AttributeOrigin origin);

struct AttributeWord {
  std::string text;
  AttributeKind kind = AttributeKind::shape;
  AttributeOrigin origin = AttributeOrigin::generated;

  /// Lowercases and trims `text`; throws ValidationError if nothing is left.
  static AttributeWord make(std::string_view text, AttributeKind kind,
                            AttributeOrigin origin = AttributeOrigin::generated);

  friend bool operator==(const AttributeWord&, const AttributeWord&) = default;
};

/// Shape and color words (set semantics per kind) plus target nouns.
struct AttributeLexicon {
  std::vector<AttributeWord> shapes;
  std::vector<AttributeWord> colors;
  std::vector<std::string> nouns{kDefaultNoun};

  const std::vector<AttributeWord>& words(AttributeKind kind) const;
  bool contains(AttributeKind kind, std::string_view text) const;
  /// Appends unless a word with the same text already exists for that kind.
  bool add(const AttributeWord& word);
  void validate() const;

  friend bool operator==(const AttributeLexicon&, const AttributeLexicon&) = default;
};

struct Prompt {
  std::optional<AttributeWord> shape;
  std::optional<AttributeWord> color;
  std::string noun;
  std::string rendered;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

/// Renders "[shape] [color] [noun]." from the parts that are present. The
/// first letter is capitalized only for a bare noun ("Nuclei.").
Prompt assemble_prompt(const std::optional<AttributeWord>& shape,
                       const std::optional<AttributeWord>& color,
                       std::string_view noun);

struct RelevanceReport {
  Prompt prompt;
  double relevance = 0.0;
  /// Images that contributed at least one candidate box.
  int n_images = 0;
  /// Images skipped because the detector returned no candidates.
  int n_skipped = 0;

  friend bool operator==(const RelevanceReport&, const RelevanceReport&) = default;
};

struct PromptSequence {
  std::vector<RelevanceReport> entries;
  int n_selected = kDefaultTopN;

  std::vector<std::string> prompts() const;
  /// Rendered prompts joined by single spaces.
  std::string joined() const;
  void validate() const;

  friend bool operator==(const PromptSequence&, const PromptSequence&) = default;
};

enum class AblationMode { full, shape_only, color_only, noun_only };

AblationMode ablation_mode_from_string(const std::string& s);

// --- attribute generation ---------------------------------------------------

/// Canonical form of a free-text VQA answer: lowercase, punctuation and
/// articles removed, first phrase only. Empty when nothing usable remains.
std::string normalize_answer(std::string_view answer);

AttributeLexicon generate_attributes(std::span<const Image> images,
                                     const std::vector<std::string>& nouns,
                                     const GroundedDetectorBackend& detector,
                                     const CaptionVqaBackend& vqa,
                                     int top_k = kDefaultAttributeTopK);

// --- augmentation -----------------------------------------------------------

/// Cleans a language-model word list: lowercase, list markers and trailing
/// punctuation stripped, empties and duplicates dropped, `exclude` removed.
std::vector<std::string> clean_word_list(const std::vector<std::string>& raw,
                                         std::string_view exclude);

std::vector<AttributeWord> synonym_augment(const AttributeWord& word,
                                           const LanguageBackend& lm);
std::vector<AttributeWord> degree_augment(const AttributeWord& word,
                                          const LanguageBackend& lm);

struct AugmentOptions {
  bool synonyms = true;
  bool degrees = true;
};

/// Synonyms of every generated word, then degree variants of the generated
/// words and their synonyms. Existing words are never removed.
AttributeLexicon augment_lexicon(const AttributeLexicon& lexicon,
                                 const LanguageBackend& lm,
                                 AugmentOptions options = {});

// --- relevance sorting ------------------------------------------------------

/// Mean over images of the mean cosine between the prompt embedding and each
/// candidate box embedding. Images without candidates are skipped.
RelevanceReport mean_relevance(const Prompt& prompt, std::span<const Image> images,
                               const GroundedDetectorBackend& detector);

std::vector<Prompt> candidate_prompts(const AttributeLexicon& lexicon,
                                      AblationMode mode = AblationMode::full);

PromptSequence build_prompt_sequence(const AttributeLexicon& lexicon,
                                     std::span<const Image> images,
                                     const GroundedDetectorBackend& detector,
                                     int n = kDefaultTopN,
                                     AblationMode mode = AblationMode::full);

// --- serialization ----------------------------------------------------------

Json to_json(const AttributeWord& word);
Json to_json(const AttributeLexicon& lexicon);
Json to_json(const Prompt& prompt);
Json to_json(const PromptSequence& sequence);
AttributeLexicon lexicon_from_json(const Json& j);
PromptSequence prompt_sequence_from_json(const Json& j);

}  // namespace attrikit
