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

#include "fact_world.hpp"

#include <set>
#include <utility>

#include "facdec/rng.hpp"

namespace facdec::testing {
namespace {

constexpr const char* kRelationWords[] = {"born",    "works",  "studied", "lives",
                                          "founded", "married", "visited", "won"};
constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                   "r", "s", "t", "v", "z", "br", "dr", "kr", "tr"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};

std::uint64_t below(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(rng.uniform01() * static_cast<double>(n)) % n;
}

// Capitalized pseudo-word of three syllables, unique within `used`.
std::string fresh_word(Rng& rng, std::set<std::string>& used) {
  for (;;) {
    std::string w;
    for (int s = 0; s < 3; ++s) {
      w += kOnsets[below(rng, std::size(kOnsets))];
      w += kVowels[below(rng, std::size(kVowels))];
    }
    w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (used.insert(w).second) return w;
  }
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[below(rng, i)]);
  }
}

}  // namespace

FactWorld build_fact_world(const FactWorldParams& params) {
  Rng rng(splitmix64(params.seed));
  std::set<std::string> used;
  const int relations = std::min<int>(params.relations, static_cast<int>(std::size(kRelationWords)));

  std::vector<std::string> names;
  for (int e = 0; e < params.entities; ++e) names.push_back(fresh_word(rng, used));
  std::vector<std::vector<std::string>> pools(static_cast<std::size_t>(relations));
  for (auto& pool : pools) {
    for (int i = 0; i < params.pool_size; ++i) pool.push_back(fresh_word(rng, used));
  }

  std::vector<std::string> tokens(names);
  for (const auto& pool : pools) tokens.insert(tokens.end(), pool.begin(), pool.end());
  for (int r = 0; r < relations; ++r) tokens.emplace_back(kRelationWords[r]);
  tokens.emplace_back(".");
  Vocabulary vocab(tokens, {"."});

  std::vector<Gazetteer::Entry> entries;
  for (const auto& n : names) entries.push_back({n, "PERSON"});
  for (const auto& pool : pools) {
    for (const auto& v : pool) entries.push_back({v, "ENTITY"});
  }

  // Values are dealt without replacement, so each belongs to one entity.
  for (auto& pool : pools) shuffle(pool, rng);

  FactWorld world;
  std::vector<KnowledgeDoc> docs;
  std::vector<std::vector<TokenId>> corpus;
  for (int e = 0; e < params.entities; ++e) {
    const std::string& name = names[static_cast<std::size_t>(e)];
    std::vector<std::string> sentences;
    std::vector<int> order(static_cast<std::size_t>(relations));
    for (int r = 0; r < relations; ++r) order[static_cast<std::size_t>(r)] = r;
    for (int s = 0; s < params.sentences_per_entity; ++s) {
      shuffle(order, rng);
      const auto facts = 1 + below(rng, static_cast<std::uint64_t>(
                                            std::min(params.max_facts_per_sentence, relations)));
      std::string sentence = name;
      for (std::uint64_t f = 0; f < facts; ++f) {
        const int r = order[f];
        sentence += std::string(" ") + kRelationWords[r] + " " +
                    pools[static_cast<std::size_t>(r)][static_cast<std::size_t>(e) %
                                                       pools[static_cast<std::size_t>(r)].size()];
      }
      sentences.push_back(sentence + ".");
    }
    shuffle(sentences, rng);
    world.sentence_count += sentences.size();

    std::vector<TokenId> seq;
    for (const auto& s : sentences) {
      const auto ids = vocab.encode(s);
      seq.insert(seq.end(), ids.begin(), ids.end());
    }
    corpus.push_back(std::move(seq));

    const std::string doc_id = "doc-" + std::to_string(e);
    Prompt prompt;
    prompt.id = "entity-" + std::to_string(e);
    prompt.text = sentences.front();
    prompt.label = PromptLabel::kFactual;
    prompt.evidence_doc_ids = {doc_id};
    world.prompts.push_back(std::move(prompt));
    docs.push_back(make_knowledge_doc(doc_id, names[static_cast<std::size_t>(e)], std::move(sentences)));
  }

  world.store = KnowledgeStore(std::move(docs));
  world.model = std::make_unique<NGramModel>(
      train_ngram(corpus, params.order, params.alpha, std::move(vocab)));
  world.gazetteer = std::make_unique<Gazetteer>(std::move(entries));
  return world;
}

}  // namespace facdec::testing
