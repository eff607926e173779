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
 * Training-data preparation: topic-prefixed sentences and sentence-completion
 * loss masks.
 *
 * Every sentence of a document is rendered as "<title> ==> <sentence>". A
 * pivot is chosen per sentence, counted in tokens of the sentence proper:
 *
 *   SC_HALF    floor(0.5 * L)
 *   SC_RANDOM  floor(u * L), u ~ U[0.25, 0.75) from a seeded stream
 *   SC_ROOT    index of the dependency ROOT, supplied by an annotation file
 *
 * Loss is masked (0) before the pivot and kept (1) from the pivot on. When a
 * record concatenates prefix and sentence tokens, prefix positions are
 * always masked.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "facdec/corpus.hpp"

namespace facdec {

inline constexpr std::string_view kTopicSeparator = " ==> ";

struct PrefixedSentence {
  std::string topic;
  std::string sentence;
  std::string rendered;
};

PrefixedSentence make_prefixed(std::string topic, std::string sentence);
// Splits on the first separator; nullopt when the separator is absent.
std::optional<PrefixedSentence> split_prefixed(std::string_view rendered);

// Throws EmptyTitle.
std::vector<PrefixedSentence> topic_prefix(const KnowledgeDoc& doc);

enum class PivotStrategy { kHalf, kRandom, kRoot };

std::string_view to_string(PivotStrategy s);
// "half", "random", "root" (also the SC_* spellings).
PivotStrategy parse_pivot_strategy(std::string_view s);

// Throws MissingSeed / MissingRootIndex, and PivotOutOfRange for a root
// index outside [0, L) or L == 0.
std::size_t sc_pivot(std::size_t sentence_token_count, PivotStrategy strategy,
                     std::optional<std::uint64_t> rng_seed = std::nullopt,
                     std::optional<std::size_t> root_index = std::nullopt);

struct LossMask {
  std::size_t pivot = 0;
  std::vector<std::uint8_t> mask;
  PivotStrategy strategy = PivotStrategy::kHalf;

  // True when every position is masked (pivot == length).
  bool contributes_no_loss() const { return pivot == mask.size(); }
  std::size_t unmasked() const { return mask.size() - pivot; }
};

// Throws PivotOutOfRange unless pivot <= token_count.
LossMask loss_mask(std::size_t token_count, std::size_t pivot, PivotStrategy strategy);

// Per-sentence seed for SC_RANDOM inside prepare_corpus.
std::uint64_t sentence_seed(std::uint64_t seed, std::string_view doc_id, std::size_t sent_idx);

// (doc_id, sent_idx) -> root index
using RootAnnotations = std::map<std::pair<std::string, std::size_t>, std::size_t>;

// JSONL lines {"doc_id", "sent_idx", "root_index"}.
RootAnnotations parse_root_annotations(std::istream& in);
RootAnnotations load_root_annotations(const std::filesystem::path& path);

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

std::vector<std::string> whitespace_tokenizer(std::string_view text);

struct TrainingRecord {
  std::string doc_id;
  std::size_t sent_idx = 0;
  std::string text;                  // rendered "topic ==> sentence"
  std::vector<std::string> tokens;   // prefix tokens then sentence tokens
  std::vector<std::uint8_t> mask;    // same length as tokens
  std::size_t pivot = 0;             // within the sentence tokens
  PivotStrategy strategy = PivotStrategy::kHalf;
};

struct PrepareOptions {
  PivotStrategy strategy = PivotStrategy::kHalf;
  std::uint64_t seed = 0;
  const RootAnnotations* roots = nullptr;  // required for kRoot
  Tokenizer tokenizer = whitespace_tokenizer;
};

struct PrepareResult {
  std::vector<TrainingRecord> records;
  // (doc_id, sent_idx) of sentences whose mask hides every token.
  std::vector<std::pair<std::string, std::size_t>> no_loss;
};

// Records follow store order, then sentence order. Throws
// MissingRootAnnotation and EmptyTitle.
PrepareResult prepare_corpus(const KnowledgeStore& store, const PrepareOptions& options);

// {"doc_id", "sent_idx", "text", "tokens", "mask", "pivot", "strategy"}
std::string serialize_record(const TrainingRecord& r);
void write_records(std::ostream& out, const std::vector<TrainingRecord>& records);

}  // namespace facdec
