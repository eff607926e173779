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
 * Language-model backends.
 *
 * Every backend maps a context (a token-id sequence) to a dense next-token
 * distribution over its vocabulary. The decoder and the perplexity scorer
 * only ever see the LanguageModel interface, so a table LM, a smoothed
 * n-gram model and a remote model served over HTTP are interchangeable.
 *
 * Backends must tolerate concurrent next_distribution() calls. The shipped
 * toy backends are immutable after construction; HttpModel opens one
 * connection per request.
 *
 * Backend spec strings (used by the CLI):
 *   table:PATH   JSON table LM
 *   ngram:PATH   binary n-gram model ("FNGM" format)
 *   http:URL     remote model speaking the logits protocol
 */

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "facdec/corpus.hpp"

namespace facdec {

class Vocabulary {
 public:
  Vocabulary() = default;
  // sentence_end lists token strings that end a sentence (default: ".").
  // end_of_text, when present in tokens, halts generation.
  explicit Vocabulary(std::vector<std::string> tokens,
                      const std::vector<std::string>& sentence_end = {"."},
                      std::optional<std::string> end_of_text = std::nullopt);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> find(std::string_view token) const;
  // Throws UnknownToken.
  TokenId id_of(std::string_view token) const;
  bool valid(TokenId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }

  std::span<const std::string> tokens() const { return tokens_; }
  const std::vector<TokenId>& sentence_end_ids() const { return sentence_end_; }
  bool is_sentence_end(TokenId id) const;
  std::optional<TokenId> end_of_text() const { return eot_; }

  // Replace the sentence-end set by token ids (e.g. from a remote vocab).
  void set_sentence_end_ids(std::vector<TokenId> ids);

  // Whitespace tokenization with trailing sentence punctuation split off
  // ("Hawaii." -> "Hawaii", "."). Unknown words map to "<unk>" when the
  // vocabulary has it, otherwise UnknownToken is thrown.
  std::vector<TokenId> encode(std::string_view text) const;
  // Tokens joined by spaces, with punctuation attached to the previous word.
  // The end-of-text token is dropped.
  std::string decode(std::span<const TokenId> ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> id_of_;
  std::vector<TokenId> sentence_end_;
  std::optional<TokenId> eot_;
};

struct TokenDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  // Non-negative entries summing to 1 within tol.
  bool is_valid(double tol = 1e-9) const;
};

// Softmax of log-probabilities (or logits), computed in double.
TokenDistribution softmax(std::span<const double> logits);

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocab() const = 0;

  // Validates context ids (UnknownToken) and returns a distribution over
  // vocab().size() tokens.
  TokenDistribution next_distribution(std::span<const TokenId> context) const;

 protected:
  virtual TokenDistribution compute_distribution(
      std::span<const TokenId> context) const = 0;
};

// Uniform distribution regardless of context.
class UniformModel final : public LanguageModel {
 public:
  explicit UniformModel(Vocabulary vocab) : vocab_(std::move(vocab)) {}
  const Vocabulary& vocab() const override { return vocab_; }

 protected:
  TokenDistribution compute_distribution(
      std::span<const TokenId> context) const override;

 private:
  Vocabulary vocab_;
};

// Explicit context -> distribution table. Lookup uses the longest suffix of
// the context present in the table; with no match (and no empty-context
// entry) the distribution is uniform.
class TableModel final : public LanguageModel {
 public:
  using Table = std::map<std::vector<TokenId>, std::vector<double>>;

  TableModel(Vocabulary vocab, Table table);
  const Vocabulary& vocab() const override { return vocab_; }

  // {"tokens": [...], "sentence_end": ["."], "end_of_text": "<eot>",
  //  "table": [{"context": [str...], "next": {str: prob}}]}
  static TableModel from_json(std::string_view json_text);
  static TableModel load(const std::filesystem::path& path);

 protected:
  TokenDistribution compute_distribution(
      std::span<const TokenId> context) const override;

 private:
  Vocabulary vocab_;
  Table table_;
  std::size_t max_context_ = 0;
};

/// Additively smoothed n-gram model with suffix backoff.
///
/// Counts are stored for every context length 0..n-1. A query uses the last
/// n-1 context tokens; if that context was never observed it backs off to the
/// longest observed suffix. For the chosen context c:
///
///   P(w | c) = (count(c, w) + alpha) / (count(c) + alpha * |V|)
///
/// A context with no observed suffix at all (only possible for models built
/// from explicit counts) yields the uniform distribution.
class NGramModel final : public LanguageModel {
 public:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::map<TokenId, std::uint64_t> next;

    friend bool operator==(const ContextCounts&, const ContextCounts&) = default;
  };
  using Counts = std::map<std::vector<TokenId>, ContextCounts>;

  NGramModel(Vocabulary vocab, int order, double alpha, Counts counts);

  const Vocabulary& vocab() const override { return vocab_; }
  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const Counts& counts() const { return counts_; }

  // Binary "FNGM" format, little-endian:
  //   magic "FNGM" | u16 version | u32 n | f64 alpha | u32 |V|
  //   |V| x (u32 byte length, bytes)            vocabulary
  //   u32 k, k x u32                            sentence-end ids
  //   u8 has_eot, u32 eot id
  //   u64 entries, entries x (u32 ctx_len, ctx_len x u32 ids, u32 next,
  //                           u64 count)        sorted by (ctx, next)
  std::string serialize() const;
  static NGramModel deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static NGramModel load(const std::filesystem::path& path);

 protected:
  TokenDistribution compute_distribution(
      std::span<const TokenId> context) const override;

 private:
  Vocabulary vocab_;
  int order_;
  double alpha_;
  Counts counts_;
};

inline constexpr std::uint16_t kNGramFormatVersion = 1;

// Throws EmptyCorpus when the corpus has no tokens, InvalidConfig for n < 1
// or alpha < 0, UnknownToken for ids outside vocab.
NGramModel train_ngram(const std::vector<std::vector<TokenId>>& corpus, int n,
                       double alpha, Vocabulary vocab);

// Whitespace split with trailing punctuation peeled into separate tokens
// ("Hawaii." -> "Hawaii", "."), matching Vocabulary::encode.
std::vector<std::string> pretokenize(std::string_view text);

// Trains on raw text, one sequence per line. The vocabulary is the sorted set
// of pretokenized words, plus end_of_text (appended to every line) when given.
NGramModel train_ngram_from_text(std::span<const std::string> lines, int n, double alpha,
                                 std::optional<std::string> end_of_text = std::nullopt);

/// Client for a model served over HTTP.
///
///   POST /vocab            -> {"tokens": [str], "sentence_end_ids": [int],
///                              "eot_id": int (optional)}
///   POST /next_token_dist  {"context": [int]} -> {"logprobs": [float; |V|]}
///
/// Log-probabilities are re-normalized locally with a softmax. Any transport
/// failure or non-200 response raises BackendUnavailable.
class HttpModel final : public LanguageModel {
 public:
  explicit HttpModel(std::string base_url, double timeout_seconds = 30.0);
  const Vocabulary& vocab() const override { return vocab_; }

 protected:
  TokenDistribution compute_distribution(
      std::span<const TokenId> context) const override;

 private:
  std::string post(const std::string& path, const std::string& body) const;

  std::string base_url_;
  double timeout_seconds_;
  Vocabulary vocab_;
};

// Builds a backend from a "table:", "ngram:" or "http:" spec string.
std::unique_ptr<LanguageModel> make_backend(std::string_view spec);

// exp(-(1/L) * sum_i log P(tokens[i] | tokens[0..i))) over positions
// i >= scored_from. Throws ZeroProbabilityToken for an exact zero and
// InvalidConfig when no position is scored.
double sequence_perplexity(const LanguageModel& model,
                           std::span<const TokenId> tokens,
                           std::size_t scored_from = 0);

}  // namespace facdec
