// Copyright 2026 The facdec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * Factuality and quality metrics.
 *
 *  - Hallucinated-NE error: hallucinated entities / detected entities,
 *    micro-averaged over the corpus. An entity is supported when any of its
 *    content-word n-grams occurs contiguously in the ground-truth document's
 *    content-word stream (lowercased, stopwords removed).
 *  - Entailment ratio: generations whose hypothesis sentence is classified
 *    ENTAILMENT against at least one evidence sentence, over all scored
 *    generations. NEUTRAL does not count.
 *  - Diversity: distinct n-grams / total n-grams pooled over a prompt's
 *    generations, averaged over prompts.
 *  - Repetition: fraction of generations whose tail is one k-token block
 *    repeated min_copies times, for some k <= max_period.
 *
 * Everything here is a pure function of its inputs except the HTTP
 * providers. MetricAccumulator::merge is associative and commutative.
 */

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "facdec/claim_filter.hpp"
#include "facdec/corpus.hpp"

namespace facdec {

using WordSet = std::unordered_set<std::string>;

// The pinned 179-word English stopword list (also shipped as
// data/stopwords_en.txt).
const WordSet& default_stopwords();
// One entry per line; blank lines and surrounding whitespace are ignored.
WordSet load_word_list(const std::filesystem::path& path);

// Lowercased word tokens of text with stopwords removed.
std::vector<std::string> content_words(std::string_view text, const WordSet& stopwords);

// ---- named entities ------------------------------------------------------

struct NamedEntity {
  std::string surface;
  std::string label;
  std::vector<std::string> content_tokens;  // lowercased, stopwords removed
  std::vector<std::string> token_ngrams;    // all contiguous n-grams, sorted, unique
};

NamedEntity make_entity(std::string surface, std::string label,
                        const WordSet& stopwords = default_stopwords());

// Content-word stream of a ground-truth document.
class DocumentTokens {
 public:
  explicit DocumentTokens(std::string_view doc_text,
                          const WordSet& stopwords = default_stopwords());

  const std::vector<std::string>& stream() const { return stream_; }
  bool contains(const std::string& word) const { return words_.count(word) > 0; }

 private:
  std::vector<std::string> stream_;
  WordSet words_;
};

bool ne_match(const NamedEntity& entity, const DocumentTokens& doc);
bool ne_match(const NamedEntity& entity, std::string_view doc_text);

class NeProvider {
 public:
  virtual ~NeProvider() = default;
  // Non-overlapping spans in left-to-right order. Throws ProviderUnavailable.
  virtual std::vector<EntitySpan> find(std::string_view text) const = 0;
};

/// Exact dictionary matcher. At each word start the longest entry that
/// matches byte-for-byte and ends on a word boundary wins; scanning resumes
/// after the match.
class Gazetteer final : public NeProvider {
 public:
  struct Entry {
    std::string surface;
    std::string label = "ENTITY";
  };

  explicit Gazetteer(std::vector<Entry> entries);
  // One surface per line, optionally followed by a TAB and a label.
  static Gazetteer load(const std::filesystem::path& path);

  std::vector<EntitySpan> find(std::string_view text) const override;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  // First word of each entry -> entry indices, longest surface first.
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_first_word_;
};

/// Client for POST /ner {"text"} -> {"entities": [{start, end, label, text}]}.
/// Offsets are validated against the text (InvalidSpan).
class HttpNer final : public NeProvider {
 public:
  explicit HttpNer(std::string base_url, double timeout_seconds = 30.0);
  std::vector<EntitySpan> find(std::string_view text) const override;

 private:
  std::string base_url_;
  double timeout_seconds_;
};

std::vector<NamedEntity> detect_entities(std::string_view text, const NeProvider& provider,
                                         const WordSet& stopwords = default_stopwords());

struct NeCounts {
  std::size_t all = 0;
  std::size_t hallucinated = 0;
};

// An entity is supported if it matches any of the documents.
NeCounts count_hallucinated(std::span<const NamedEntity> entities,
                            std::span<const DocumentTokens> docs);

struct EntityCheck {
  std::span<const NamedEntity> entities;
  std::span<const DocumentTokens> docs;
};

// Micro-average over every entity of every generation. Throws
// NoEntitiesInCorpus when no generation has an entity.
double ne_error(std::span<const EntityCheck> generations);

// ---- entailment ----------------------------------------------------------

enum class EntailmentClass { kEntailment = 0, kNeutral = 1, kContradiction = 2 };

std::string_view to_string(EntailmentClass c);

struct EntailmentLabel {
  EntailmentClass label = EntailmentClass::kNeutral;
  std::array<double, 3> probs{0.0, 1.0, 0.0};  // entailment, neutral, contradiction
};

class NliProvider {
 public:
  virtual ~NliProvider() = default;
  // Throws NliUnavailable.
  virtual EntailmentLabel classify(std::string_view premise,
                                   std::string_view hypothesis) const = 0;
};

/// Client for POST /nli {"premise", "hypothesis"} -> {"label", "probs"}.
class HttpNli final : public NliProvider {
 public:
  explicit HttpNli(std::string base_url, double timeout_seconds = 30.0);
  EntailmentLabel classify(std::string_view premise,
                           std::string_view hypothesis) const override;

 private:
  std::string base_url_;
  double timeout_seconds_;
};

/// Offline stand-in for an NLI model: ENTAILMENT when every content word of
/// the hypothesis occurs in the premise, NEUTRAL otherwise. Never predicts
/// CONTRADICTION. Used when no NLI endpoint is configured.
class LexicalNli final : public NliProvider {
 public:
  explicit LexicalNli(WordSet stopwords = default_stopwords())
      : stopwords_(std::move(stopwords)) {}
  EntailmentLabel classify(std::string_view premise,
                           std::string_view hypothesis) const override;

 private:
  WordSet stopwords_;
};

inline constexpr std::size_t kHypothesisMaxBytes = 300;

// First sentence of the generation that passes the check-worthiness rules
// under the given NE provider (the first sentence if none does), truncated
// to 300 bytes on a UTF-8 boundary.
std::string entailment_hypothesis(std::string_view generation_text,
                                  const NeProvider& ner);

struct EntailmentInput {
  std::string hypothesis;
  std::vector<std::string> premises;  // retrieved evidence sentences
};

struct EntailmentCounts {
  std::size_t evaluated = 0;
  std::size_t entailed = 0;
  std::size_t empty_evidence = 0;  // excluded from evaluated

  double ratio() const {
    return evaluated ? static_cast<double>(entailed) / static_cast<double>(evaluated)
                     : 0.0;
  }
};

bool is_entailed(const EntailmentInput& input, const NliProvider& nli);
EntailmentCounts count_entailed(std::span<const EntailmentInput> inputs,
                                const NliProvider& nli);
double entail_ratio(std::span<const EntailmentInput> inputs, const NliProvider& nli);

// ---- diversity and repetition --------------------------------------------

struct NgramStats {
  std::size_t distinct = 0;
  std::size_t total = 0;
  double ratio() const {
    return total ? static_cast<double>(distinct) / static_cast<double>(total) : 0.0;
  }
};

using TokenGroup = std::vector<std::span<const TokenId>>;

// n-grams never span two generations.
NgramStats group_ngram_stats(const TokenGroup& group, int n = 4);

// Mean of per-group ratios over groups with at least one n-gram; 0 when no
// group has any.
double diversity(std::span<const TokenGroup> groups, int n = 4);

struct RepetitionParams {
  int min_copies = 3;
  int max_period = 20;
};

bool repetition_flag(std::span<const TokenId> tokens,
                     RepetitionParams params = RepetitionParams{});

// ---- accumulation --------------------------------------------------------

/// Per-prompt partial results keyed by prompt id. Merging is a union of
/// disjoint prompt sets; final values are computed by iterating prompts in
/// id order, so any merge order produces bit-identical reports.
class MetricAccumulator {
 public:
  struct PromptPart {
    std::size_t generations = 0;
    std::size_t checkworthy = 0;
    std::size_t all_ne = 0;
    std::size_t hallu_ne = 0;
    std::size_t entail_evaluated = 0;
    std::size_t entailed = 0;
    std::size_t empty_evidence = 0;
    std::size_t repeated = 0;
    NgramStats ngrams;
    std::vector<double> perplexities;  // generation order
  };

  void add(const std::string& prompt_id, PromptPart part);
  // Throws Error when both sides contain the same prompt id.
  void merge(const MetricAccumulator& other);

  const std::map<std::string, PromptPart>& parts() const { return parts_; }

  // Fills every metric and count field of report (config is left untouched).
  void finalize(FactualityReport& report) const;

 private:
  std::map<std::string, PromptPart> parts_;
};

}  // namespace facdec
