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

#include "facdec/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "facdec/errors.hpp"
#include "facdec/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace facdec {
namespace {

std::size_t argmax_with_ties(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] + kScoreTieEpsilon) best = i;
  }
  return best;
}

void l2_normalize(TfidfIndex::SparseVector& v) {
  double norm = 0.0;
  for (const auto& [_, w] : v) norm += w * w;
  if (norm <= 0.0) return;
  norm = std::sqrt(norm);
  for (auto& [_, w] : v) w /= norm;
}

double sparse_dot(const TfidfIndex::SparseVector& a, const TfidfIndex::SparseVector& b) {
  double dot = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      dot += a[i].second * b[j].second;
      ++i;
      ++j;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

}  // namespace

TfidfIndex::TfidfIndex(std::span<const std::string> candidates) {
  std::vector<std::map<std::size_t, std::size_t>> tf(candidates.size());
  std::vector<std::size_t> df;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (auto& tok : text::word_tokens(candidates[c])) {
      auto [it, inserted] = terms_.emplace(std::move(tok), terms_.size());
      if (inserted) df.push_back(0);
      if (tf[c][it->second]++ == 0) ++df[it->second];
    }
  }
  const double n = static_cast<double>(candidates.size());
  idf_.resize(df.size());
  for (std::size_t t = 0; t < df.size(); ++t) {
    idf_[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  }
  doc_vectors_.reserve(candidates.size());
  for (const auto& counts : tf) {
    SparseVector v;
    v.reserve(counts.size());
    for (const auto& [term, count] : counts) {
      v.emplace_back(term, static_cast<double>(count) * idf_[term]);
    }
    l2_normalize(v);
    doc_vectors_.push_back(std::move(v));
  }
}

TfidfIndex::SparseVector TfidfIndex::vectorize(std::string_view text) const {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& tok : text::word_tokens(text)) {
    auto it = terms_.find(tok);
    if (it != terms_.end()) ++counts[it->second];
  }
  SparseVector v;
  v.reserve(counts.size());
  for (const auto& [term, count] : counts) {
    v.emplace_back(term, static_cast<double>(count) * idf_[term]);
  }
  l2_normalize(v);
  return v;
}

std::vector<double> TfidfIndex::scores(std::string_view query) const {
  const SparseVector q = vectorize(query);
  std::vector<double> out;
  out.reserve(doc_vectors_.size());
  for (const auto& d : doc_vectors_) {
    out.push_back(std::clamp(sparse_dot(q, d), 0.0, 1.0));
  }
  return out;
}

RetrievalHit TfidfIndex::best(std::string_view query) const {
  if (doc_vectors_.empty()) throw EmptyCandidates();
  const auto s = scores(query);
  const std::size_t i = argmax_with_ties(s);
  return {i, s[i]};
}

RetrievalHit tfidf_retrieve(std::string_view query,
                            std::span<const std::string> candidates) {
  if (candidates.empty()) throw EmptyCandidates();
  return TfidfIndex(candidates).best(query);
}

// ---- embeddings ----------------------------------------------------------

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw EmbedderUnavailable("embedding dimensions differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

HttpEmbedder::HttpEmbedder(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

std::vector<std::vector<double>> HttpEmbedder::embed(std::span<const std::string> texts) {
  using json = nlohmann::json;
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    std::unordered_set<std::string> queued;
    for (const auto& t : texts) {
      if (!memo_.count(t) && queued.insert(t).second) missing.push_back(t);
    }
  }
  if (!missing.empty()) {
    httplib::Client client(base_url_);
    const auto secs = static_cast<time_t>(timeout_seconds_);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    json req;
    req["texts"] = missing;
    auto res = client.Post("/embed", req.dump(), "application/json");
    if (!res) {
      throw EmbedderUnavailable("cannot reach " + base_url_ + "/embed: " +
                                httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw EmbedderUnavailable("/embed returned HTTP " + std::to_string(res->status));
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("vectors") || !j["vectors"].is_array() ||
        j["vectors"].size() != missing.size()) {
      throw EmbedderUnavailable("malformed /embed response");
    }
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < missing.size(); ++i) {
      try {
        memo_[missing[i]] = j["vectors"][i].get<std::vector<double>>();
      } catch (const json::exception& e) {
        throw EmbedderUnavailable(std::string("malformed /embed vector: ") + e.what());
      }
    }
  }
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  std::lock_guard lock(mu_);
  for (const auto& t : texts) out.push_back(memo_.at(t));
  return out;
}

RetrievalHit embed_retrieve(std::string_view query,
                            std::span<const std::string> candidates,
                            Embedder& embedder) {
  if (candidates.empty()) throw EmptyCandidates();
  std::vector<std::string> texts;
  texts.reserve(candidates.size() + 1);
  texts.emplace_back(query);
  texts.insert(texts.end(), candidates.begin(), candidates.end());
  const auto vectors = embedder.embed(texts);
  if (vectors.size() != texts.size()) {
    throw EmbedderUnavailable("embedder returned the wrong number of vectors");
  }
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (std::size_t i = 1; i < vectors.size(); ++i) {
    scores.push_back(cosine(vectors[0], vectors[i]));
  }
  const std::size_t best = argmax_with_ties(scores);
  return {best, scores[best]};
}

// ---- evidence bundles ----------------------------------------------------

std::vector<const KnowledgeDoc*> doc_ground_truth(const Prompt& prompt,
                                                  const KnowledgeStore& store) {
  std::vector<const KnowledgeDoc*> docs;
  docs.reserve(prompt.evidence_doc_ids.size());
  for (const auto& id : prompt.evidence_doc_ids) docs.push_back(&store.at(id));
  return docs;
}

EvidenceBundle build_evidence(std::string_view generation_text,
                              const Prompt& prompt, const KnowledgeStore& store,
                              Embedder* embedder) {
  EvidenceBundle bundle;
  bundle.query_text = std::string(generation_text);
  bundle.doc_level = doc_ground_truth(prompt, store);

  std::vector<std::string> pool;
  std::vector<std::pair<const KnowledgeDoc*, std::size_t>> origin;
  for (const KnowledgeDoc* d : bundle.doc_level) {
    for (std::size_t i = 0; i < d->sentences.size(); ++i) {
      pool.push_back(d->sentences[i]);
      origin.emplace_back(d, i);
    }
  }
  if (pool.empty()) return bundle;

  auto add = [&](const RetrievalHit& hit, EvidenceSource source) {
    const auto& [doc, idx] = origin[hit.index];
    for (const auto& e : bundle.sentence_level) {
      if (e.doc_id == doc->doc_id && e.sentence_index == idx) return;
    }
    bundle.sentence_level.push_back(
        {doc->doc_id, idx, pool[hit.index], hit.score, source});
  };
  add(tfidf_retrieve(generation_text, pool), EvidenceSource::kTfidf);
  if (embedder) {
    add(embed_retrieve(generation_text, pool, *embedder), EvidenceSource::kEmbedding);
  }
  return bundle;
}

}  // namespace facdec
