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
 * Ground-truth knowledge for scoring a generation.
 *
 * Document-level evidence is the prompt's annotated document list, looked up
 * in the knowledge store. Sentence-level evidence is picked from the pool of
 * all sentences of those documents with the generation as the query: one
 * sentence by TF-IDF cosine and, when an embedder is configured, one by
 * embedding cosine.
 *
 * TF-IDF weighting, fitted on the candidate pool only:
 *   tf(term, s)  = raw count of the lowercased word token in s
 *   idf(term)    = ln((1 + N) / (1 + df(term))) + 1
 * Vectors are L2-normalized. Query terms absent from the pool carry no
 * weight. Ties (scores within 1e-12) go to the lowest candidate index.
 */

#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "facdec/corpus.hpp"

namespace facdec {

inline constexpr double kScoreTieEpsilon = 1e-12;

struct RetrievalHit {
  std::size_t index = 0;
  double score = 0.0;
};

class TfidfIndex {
 public:
  // (term index, weight), sorted by term index.
  using SparseVector = std::vector<std::pair<std::size_t, double>>;

  explicit TfidfIndex(std::span<const std::string> candidates);

  std::size_t size() const { return doc_vectors_.size(); }
  std::size_t vocabulary_size() const { return terms_.size(); }
  const std::vector<double>& idf() const { return idf_; }
  const SparseVector& doc_vector(std::size_t i) const { return doc_vectors_.at(i); }

  SparseVector vectorize(std::string_view text) const;
  // Cosine against every candidate.
  std::vector<double> scores(std::string_view query) const;
  RetrievalHit best(std::string_view query) const;

 private:
  std::unordered_map<std::string, std::size_t> terms_;
  std::vector<double> idf_;
  std::vector<SparseVector> doc_vectors_;
};

// Throws EmptyCandidates.
RetrievalHit tfidf_retrieve(std::string_view query,
                            std::span<const std::string> candidates);

class Embedder {
 public:
  virtual ~Embedder() = default;
  // One vector per input, in input order. Throws EmbedderUnavailable.
  virtual std::vector<std::vector<double>> embed(
      std::span<const std::string> texts) = 0;
};

/// Client for POST /embed {"texts": [str]} -> {"vectors": [[float]]}.
/// Vectors are memoized by text; the memo is guarded by a mutex.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(std::string base_url, double timeout_seconds = 60.0);
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

 private:
  std::string base_url_;
  double timeout_seconds_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> memo_;
};

double cosine(std::span<const double> a, std::span<const double> b);

// Throws EmptyCandidates; propagates EmbedderUnavailable.
RetrievalHit embed_retrieve(std::string_view query,
                            std::span<const std::string> candidates,
                            Embedder& embedder);

enum class EvidenceSource { kTfidf, kEmbedding };

struct EvidenceSentence {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::string text;
  double score = 0.0;
  EvidenceSource source = EvidenceSource::kTfidf;
};

// doc_level points into the KnowledgeStore it was built from.
struct EvidenceBundle {
  std::vector<const KnowledgeDoc*> doc_level;
  std::vector<EvidenceSentence> sentence_level;  // at most 2
  std::string query_text;
};

// Annotated documents in annotation order; throws MissingDoc.
std::vector<const KnowledgeDoc*> doc_ground_truth(const Prompt& prompt,
                                                  const KnowledgeStore& store);

EvidenceBundle build_evidence(std::string_view generation_text,
                              const Prompt& prompt, const KnowledgeStore& store,
                              Embedder* embedder = nullptr);

}  // namespace facdec
