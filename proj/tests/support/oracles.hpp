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

// Brute-force reference implementations used to cross-check the library.
// Each one restates a definition directly, with no shared code path beyond
// word tokenization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facdec/corpus.hpp"
#include "facdec/metrics.hpp"
#include "facdec/rng.hpp"
#include "facdec/text.hpp"

namespace facdec::oracle {

struct Hit {
  std::size_t index = 0;
  double score = 0.0;
};

inline std::size_t first_within(std::span<const double> scores, double eps) {
  const double top = *std::max_element(scores.begin(), scores.end());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= top - eps) return i;
  }
  return 0;
}

// Dense TF-IDF with idf = ln((1+N)/(1+df)) + 1 over the candidates.
inline Hit tfidf(const std::string& query, const std::vector<std::string>& candidates) {
  std::vector<std::string> terms;
  std::vector<std::vector<std::string>> docs;
  for (const auto& c : candidates) {
    docs.push_back(text::word_tokens(c));
    terms.insert(terms.end(), docs.back().begin(), docs.back().end());
  }
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  const double n = static_cast<double>(candidates.size());

  auto dense = [&](const std::vector<std::string>& words) {
    std::vector<double> v(terms.size(), 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const double tf = static_cast<double>(std::count(words.begin(), words.end(), terms[t]));
      if (tf == 0) continue;
      double df = 0;
      for (const auto& d : docs) df += std::find(d.begin(), d.end(), terms[t]) != d.end();
      v[t] = tf * (std::log((1.0 + n) / (1.0 + df)) + 1.0);
    }
    double norm = 0;
    for (double x : v) norm += x * x;
    if (norm > 0) {
      for (double& x : v) x /= std::sqrt(norm);
    }
    return v;
  };

  const auto q = dense(text::word_tokens(query));
  std::vector<double> scores;
  for (const auto& d : docs) {
    const auto dv = dense(d);
    double dot = 0;
    for (std::size_t t = 0; t < terms.size(); ++t) dot += q[t] * dv[t];
    scores.push_back(dot);
  }
  const std::size_t best = first_within(scores, 1e-12);
  return {best, scores[best]};
}

inline std::vector<std::string> content(const std::string& s, const WordSet& stopwords) {
  std::vector<std::string> out;
  for (auto& w : text::word_tokens(s)) {
    if (!stopwords.count(w)) out.push_back(std::move(w));
  }
  return out;
}

// Some contiguous n-gram of the entity's content words occurs contiguously
// in the document's content-word stream.
inline bool ne_match(const std::string& entity, const std::string& doc,
                     const WordSet& stopwords = default_stopwords()) {
  const auto e = content(entity, stopwords);
  const auto d = content(doc, stopwords);
  for (std::size_t n = 1; n <= e.size(); ++n) {
    for (std::size_t i = 0; i + n <= e.size(); ++i) {
      for (std::size_t j = 0; j + n <= d.size(); ++j) {
        if (std::equal(e.begin() + static_cast<std::ptrdiff_t>(i),
                       e.begin() + static_cast<std::ptrdiff_t>(i + n),
                       d.begin() + static_cast<std::ptrdiff_t>(j))) {
          return true;
        }
      }
    }
  }
  return false;
}

// Mean over groups (with at least one n-gram) of distinct/total n-grams.
inline double diversity(const std::vector<std::vector<std::vector<TokenId>>>& groups, int n) {
  double sum = 0;
  int counted = 0;
  for (const auto& group : groups) {
    std::set<std::vector<TokenId>> distinct;
    std::size_t total = 0;
    for (const auto& seq : group) {
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size(); ++i) {
        distinct.emplace(seq.begin() + static_cast<std::ptrdiff_t>(i),
                         seq.begin() + static_cast<std::ptrdiff_t>(i) + n);
        ++total;
      }
    }
    if (total == 0) continue;
    sum += static_cast<double>(distinct.size()) / static_cast<double>(total);
    ++counted;
  }
  return counted ? sum / counted : 0.0;
}

// The last k tokens, repeated min_copies times back to back, end the
// sequence for some k in [1, max_period].
inline bool repetition(const std::vector<TokenId>& seq, int min_copies, int max_period) {
  for (int k = 1; k <= max_period; ++k) {
    const std::size_t len = static_cast<std::size_t>(k) * static_cast<std::size_t>(min_copies);
    if (len > seq.size()) continue;
    const std::vector<TokenId> block(seq.end() - k, seq.end());
    bool all = true;
    for (int c = 1; c < min_copies && all; ++c) {
      const auto start = seq.end() - static_cast<std::ptrdiff_t>((c + 1) * k);
      all = std::equal(block.begin(), block.end(), start);
    }
    if (all) return true;
  }
  return false;
}

// ---- random instances ----------------------------------------------------

inline std::size_t below(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n)) % n;
}

// A sentence over a small vocabulary so that terms recur across candidates.
// Stopwords are mixed in to exercise the stopword rules.
inline std::string random_sentence(Rng& rng, std::size_t max_words = 8) {
  static const char* kWords[] = {"obama", "Hawaii", "born",  "the",    "of",    "Paris",
                                 "city",  "river",  "France", "in",    "New",   "York",
                                 "Matrix", "values", "a",     "Sparks", "novel", "and"};
  std::string s;
  const std::size_t n = 1 + below(rng, max_words);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[below(rng, std::size(kWords))];
  }
  if (rng.uniform01() < 0.5) s += '.';
  return s;
}

// Token sequence over a small alphabet; with a periodic tail planted in
// about half of the cases.
inline std::vector<TokenId> random_tokens(Rng& rng, std::size_t max_len = 80,
                                          int alphabet = 6) {
  std::vector<TokenId> seq(below(rng, max_len + 1));
  for (auto& t : seq) t = static_cast<TokenId>(below(rng, static_cast<std::size_t>(alphabet)));
  if (rng.uniform01() < 0.5) {
    const std::size_t period = 1 + below(rng, 24);
    const std::size_t copies = 1 + below(rng, 4);
    std::vector<TokenId> block(period);
    for (auto& t : block) t = static_cast<TokenId>(below(rng, static_cast<std::size_t>(alphabet)));
    for (std::size_t c = 0; c < copies; ++c) seq.insert(seq.end(), block.begin(), block.end());
  }
  return seq;
}

}  // namespace facdec::oracle
