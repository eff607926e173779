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

// Data types shared by every stage of the pipeline, and their JSONL forms:
//
//   prompts.jsonl      {"id", "prompt", "label", "evidence_docs"}
//   knowledge.jsonl    {"doc_id", "title", "sentences"}
//   generations.jsonl  {"prompt_id", "seed", "text", "tokens", "trace"}
//
// Loaded stores are immutable and may be read from any number of threads.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "facdec/decode_config.hpp"

namespace facdec {

using TokenId = std::int32_t;

enum class PromptLabel { kFactual, kNonfactual };

std::string_view to_string(PromptLabel l);
PromptLabel parse_prompt_label(std::string_view s);

struct Prompt {
  std::string id;
  std::string text;
  PromptLabel label = PromptLabel::kFactual;
  std::vector<std::string> evidence_doc_ids;

  friend bool operator==(const Prompt&, const Prompt&) = default;
};

std::vector<Prompt> parse_prompts(std::istream& in,
                                  const std::string& source = "<stream>");
std::vector<Prompt> parse_prompts_file(const std::filesystem::path& path);
std::string serialize_prompt(const Prompt& p);
void write_prompts(std::ostream& out, std::span<const Prompt> prompts);

struct PromptStatistics {
  std::size_t factual = 0;
  std::size_t nonfactual = 0;
  double factual_avg_tokens = 0.0;
  double nonfactual_avg_tokens = 0.0;
};

// Counts per label and mean whitespace-token length of the prompt sentence.
PromptStatistics prompt_statistics(std::span<const Prompt> prompts);

struct KnowledgeDoc {
  std::string doc_id;
  std::string title;
  std::vector<std::string> sentences;
  std::string full_text;  // sentences joined by one space
};

// Builds a doc and its full_text; throws MalformedDoc if sentences is empty.
KnowledgeDoc make_knowledge_doc(std::string doc_id, std::string title,
                                std::vector<std::string> sentences);

class KnowledgeStore {
 public:
  KnowledgeStore() = default;
  explicit KnowledgeStore(std::vector<KnowledgeDoc> docs);

  // Throws MissingDoc.
  const KnowledgeDoc& at(std::string_view doc_id) const;
  const KnowledgeDoc* find(std::string_view doc_id) const;
  bool contains(std::string_view doc_id) const { return find(doc_id); }

  std::size_t size() const { return docs_.size(); }
  // Documents in load order.
  std::span<const KnowledgeDoc> docs() const { return docs_; }

 private:
  std::vector<KnowledgeDoc> docs_;
  std::unordered_map<std::string, std::size_t> index_;
};

KnowledgeStore parse_knowledge(std::istream& in,
                               const std::string& source = "<stream>");
// A single JSONL file, or a directory whose *.jsonl files are read in
// lexicographic filename order.
KnowledgeStore load_knowledge_store(const std::filesystem::path& path);
std::string serialize_knowledge_doc(const KnowledgeDoc& doc);

struct TraceStep {
  int t_in_sentence = 1;
  double p_t = 0.0;
  bool sentence_reset = false;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Generation {
  std::string prompt_id;
  std::vector<TokenId> tokens;  // prompt tokens followed by generated tokens
  std::string text;             // detokenized continuation
  std::vector<TraceStep> trace;  // one entry per generated token
  std::uint64_t seed = 0;
  std::optional<bool> checkworthy;

  std::size_t prompt_length() const { return tokens.size() - trace.size(); }
  std::span<const TokenId> continuation() const {
    return std::span<const TokenId>(tokens).subspan(prompt_length());
  }

  friend bool operator==(const Generation&, const Generation&) = default;
};

std::string serialize_generation(const Generation& g);
Generation parse_generation(std::string_view line, std::size_t line_no = 0);
void write_generations(std::ostream& out, std::span<const Generation> gens);
std::vector<Generation> read_generations(const std::filesystem::path& path);

struct ReportCounts {
  std::size_t prompts = 0;
  std::size_t generations = 0;
  std::size_t checkworthy = 0;
  std::size_t all_ne = 0;
  std::size_t hallu_ne = 0;
  std::size_t entailed = 0;
  // Check-worthy generations excluded from the entailment ratio because no
  // evidence sentence was available.
  std::size_t empty_evidence = 0;
  std::size_t repeated = 0;

  friend bool operator==(const ReportCounts&, const ReportCounts&) = default;
};

struct FactualityReport {
  DecodeConfig config;
  double ne_error = 0.0;
  double entail_ratio = 0.0;
  double diversity = 0.0;
  double repetition = 0.0;
  double mean_perplexity = 0.0;
  ReportCounts counts;

  std::string label() const { return config.label(); }
};

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kCodeVersion = "0.1.0";

// Pretty-printed JSON with schema and code version attached.
std::string serialize_report(const FactualityReport& r);
FactualityReport parse_report(std::string_view json);
FactualityReport read_report(const std::filesystem::path& path);

}  // namespace facdec
