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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "facdec/errors.hpp"
#include "facdec/metrics.hpp"
#include "oracles.hpp"

using namespace facdec;

namespace {

std::vector<TokenId> toks(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

class FixedNli final : public NliProvider {
 public:
  explicit FixedNli(EntailmentClass c) : c_(c) {}
  EntailmentLabel classify(std::string_view, std::string_view) const override {
    EntailmentLabel l;
    l.label = c_;
    return l;
  }

 private:
  EntailmentClass c_;
};

// ENTAILMENT exactly for the listed hypotheses.
class ScriptedNli final : public NliProvider {
 public:
  explicit ScriptedNli(std::set<std::string> yes) : yes_(std::move(yes)) {}
  EntailmentLabel classify(std::string_view, std::string_view h) const override {
    EntailmentLabel l;
    l.label = yes_.count(std::string(h)) ? EntailmentClass::kEntailment : EntailmentClass::kNeutral;
    return l;
  }

 private:
  std::set<std::string> yes_;
};

// Spans into the caller's sequences, which must outlive the group.
TokenGroup group_of(std::initializer_list<std::span<const TokenId>> seqs) { return seqs; }

TokenGroup group_of(const std::vector<std::vector<TokenId>>& seqs) {
  TokenGroup g;
  for (const auto& s : seqs) g.emplace_back(s);
  return g;
}

}  // namespace

TEST_CASE("stopword list") {
  const auto& sw = default_stopwords();
  CHECK(sw.size() == 179);
  CHECK(sw.count("the"));
  CHECK_FALSE(sw.count("obama"));
  CHECK(content_words("The Matrix of the values", sw) ==
        std::vector<std::string>{"matrix", "values"});
}

TEST_CASE("partial n-gram entity match") {
  CHECK(ne_match(make_entity("Obama", "PERSON"), "Barack Hussein Obama II was born in Hawaii."));
  CHECK(ne_match(make_entity("The Matrix", "WORK"), "the matrix of values"));
  CHECK_FALSE(ne_match(make_entity("Nicholas Sparks", "PERSON"), "Obama was born in Hawaii."));
  // Overlap on a stopword alone is not support.
  CHECK_FALSE(ne_match(make_entity("The Beatles", "ORG"), "the band played"));
}

TEST_CASE("entity n-grams") {
  const auto e = make_entity("Barack Hussein Obama", "PERSON");
  CHECK(e.content_tokens == std::vector<std::string>{"barack", "hussein", "obama"});
  CHECK(e.token_ngrams.size() == 6);
  CHECK(make_entity("The", "X").content_tokens.empty());
}

TEST_CASE("ne_match agrees with the brute-force oracle") {
  Rng rng(17);
  int matches = 0;
  for (int i = 0; i < 300; ++i) {
    const auto entity = oracle::random_sentence(rng, 3);
    const auto doc = oracle::random_sentence(rng, 12);
    const bool got = ne_match(make_entity(entity, "X"), doc);
    CHECK(got == oracle::ne_match(entity, doc));
    matches += got;
  }
  CHECK(matches > 20);
  CHECK(matches < 280);
}

TEST_CASE("ne_error examples") {
  const std::vector<DocumentTokens> doc{DocumentTokens("Barack Obama was born in Hawaii in 1961.")};
  SUBCASE("four entities, one unmatched") {
    const std::vector<NamedEntity> e{make_entity("Obama", "P"), make_entity("Hawaii", "G"),
                                     make_entity("Barack Obama", "P"), make_entity("Kenya", "G")};
    const std::vector<EntityCheck> g{{e, doc}};
    CHECK(ne_error(g) == 0.25);
  }
  SUBCASE("micro average over generations") {
    const std::vector<NamedEntity> g1{make_entity("Hawaii", "G"), make_entity("Kenya", "G")};
    const std::vector<NamedEntity> g2{make_entity("Obama", "P")};
    const std::vector<EntityCheck> g{{g1, doc}, {g2, doc}};
    CHECK(ne_error(g) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("all matched") {
    const std::vector<NamedEntity> e{make_entity("Obama", "P")};
    const std::vector<EntityCheck> g{{e, doc}};
    CHECK(ne_error(g) == 0.0);
  }
  SUBCASE("no entities at all") {
    const std::vector<EntityCheck> g{{{}, doc}};
    CHECK_THROWS_AS(ne_error(g), NoEntitiesInCorpus);
  }
}

TEST_CASE("support from any evidence document") {
  const std::vector<DocumentTokens> docs{DocumentTokens("Hawaii is an island."),
                                         DocumentTokens("Kenya is in Africa.")};
  const std::vector<NamedEntity> e{make_entity("Kenya", "G"), make_entity("Warsaw", "G")};
  const auto c = count_hallucinated(e, docs);
  CHECK(c.all == 2);
  CHECK(c.hallucinated == 1);
}

TEST_CASE("gazetteer matching") {
  const Gazetteer g(std::vector<Gazetteer::Entry>{{"Barack Obama", "PERSON"}, {"Hawaii", "GPE"}});
  const std::string text = "Barack Obama visited Hawaii";
  const auto spans = g.find(text);
  REQUIRE(spans.size() == 2);
  CHECK(text.substr(spans[0].start, spans[0].end - spans[0].start) == "Barack Obama");
  CHECK(spans[0].label == "PERSON");
  CHECK(text.substr(spans[1].start, spans[1].end - spans[1].start) == "Hawaii");

  const Gazetteer ny(std::vector<Gazetteer::Entry>{{"New York", "GPE"}, {"New York City", "GPE"}});
  const auto one = ny.find("New York City");
  REQUIRE(one.size() == 1);
  CHECK(one[0].end == 13);

  CHECK(Gazetteer(std::vector<Gazetteer::Entry>{}).find("Barack Obama").empty());
  // Matches end on a word boundary.
  CHECK(Gazetteer(std::vector<Gazetteer::Entry>{{"Hawaii", "GPE"}}).find("Hawaiian food").empty());
}

TEST_CASE("gazetteer file") {
  const auto g = Gazetteer::load(FACDEC_DATA_DIR "/example/gazetteer.txt");
  CHECK(g.size() > 3);
  const auto e = detect_entities("Marie Curie was born in Warsaw.", g);
  REQUIRE_FALSE(e.empty());
  CHECK(e[0].surface == "Marie Curie");
}

TEST_CASE("entailment ratio examples") {
  std::vector<EntailmentInput> inputs;
  for (int i = 0; i < 10; ++i) inputs.push_back({"h" + std::to_string(i), {"premise"}});
  CHECK(entail_ratio(inputs, FixedNli(EntailmentClass::kEntailment)) == 1.0);
  CHECK(entail_ratio(inputs, FixedNli(EntailmentClass::kNeutral)) == 0.0);
  CHECK(entail_ratio(inputs, FixedNli(EntailmentClass::kContradiction)) == 0.0);

  inputs.resize(8);
  CHECK(entail_ratio(inputs, ScriptedNli({"h1", "h4", "h6"})) == 0.375);
}

TEST_CASE("any evidence sentence can entail") {
  const LexicalNli nli;
  const EntailmentInput in{"Obama was born in Hawaii.",
                           {"He was president.", "Barack Obama was born in Hawaii in 1961."}};
  CHECK(is_entailed(in, nli));
  CHECK_THROWS_AS(is_entailed({"x", {}}, nli), EmptyEvidence);
  const auto c = count_entailed(std::vector<EntailmentInput>{in, {"x", {}}}, nli);
  CHECK(c.evaluated == 1);
  CHECK(c.empty_evidence == 1);
  CHECK(c.ratio() == 1.0);
}

TEST_CASE("lexical NLI stub") {
  const LexicalNli nli;
  CHECK(nli.classify("Obama was born in Hawaii.", "Obama was born in Hawaii.").label ==
        EntailmentClass::kEntailment);
  CHECK(nli.classify("Obama was born in Hawaii.", "Obama was born in Kenya.").label ==
        EntailmentClass::kNeutral);
}

TEST_CASE("entailment hypothesis is the first check-worthy sentence") {
  const Gazetteer g(std::vector<Gazetteer::Entry>{{"Obama", "PERSON"}});
  CHECK(entailment_hypothesis("I like it. Obama was born in Hawaii. Obama won.", g) ==
        "Obama was born in Hawaii.");
  CHECK(entailment_hypothesis("Nothing here. Still nothing.", g) == "Nothing here.");
  CHECK(entailment_hypothesis("", g).empty());
  const std::string long_sentence = "Obama " + std::string(400, 'x') + ".";
  CHECK(entailment_hypothesis(long_sentence, g).size() == kHypothesisMaxBytes);
}

TEST_CASE("diversity examples") {
  const std::vector<TokenId> distinct = toks({1, 2, 3, 4, 5});
  const std::vector<TokenId> same = toks({1, 1, 1, 1, 1, 1});
  const std::vector<TokenGroup> a{group_of({distinct})};
  const std::vector<TokenGroup> b{group_of({same})};
  CHECK(diversity(a) == 1.0);
  CHECK(diversity(b) == doctest::Approx(1.0 / 3.0));
  // Groups without any 4-gram do not count.
  const std::vector<TokenGroup> c{group_of({distinct}), group_of({toks({1, 2})})};
  CHECK(diversity(c) == 1.0);
  CHECK(diversity(std::vector<TokenGroup>{}) == 0.0);
}

TEST_CASE("n-grams never span generations") {
  const auto s = group_ngram_stats(group_of({toks({1, 2, 3}), toks({4, 5, 6})}), 4);
  CHECK(s.total == 0);
}

TEST_CASE("duplicating a generation strictly lowers diversity") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<TokenId> seq(8 + oracle::below(rng, 20));
    for (auto& t : seq) t = static_cast<TokenId>(oracle::below(rng, 50));
    const auto one = group_ngram_stats(group_of({seq}), 4).ratio();
    const auto two = group_ngram_stats(group_of({seq, seq}), 4).ratio();
    CHECK(two < one);
  }
}

TEST_CASE("diversity agrees with the set-based oracle") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::vector<std::vector<TokenId>>> raw(1 + oracle::below(rng, 4));
    for (auto& g : raw) {
      g.resize(1 + oracle::below(rng, 4));
      for (auto& s : g) s = oracle::random_tokens(rng, 20, 3);
    }
    std::vector<TokenGroup> groups;
    for (const auto& g : raw) groups.push_back(group_of(g));
    CHECK(diversity(groups) == oracle::diversity(raw, 4));
  }
}

TEST_CASE("repetition examples") {
  // "... the city . the city . the city ."
  CHECK(repetition_flag(toks({9, 8, 1, 2, 3, 1, 2, 3, 1, 2, 3})));
  std::vector<TokenId> distinct(150);
  for (int i = 0; i < 150; ++i) distinct[static_cast<std::size_t>(i)] = i;
  CHECK_FALSE(repetition_flag(distinct));
  CHECK_FALSE(repetition_flag(toks({1, 2, 1, 2})));
  CHECK(repetition_flag(toks({1, 2, 1, 2}), {2, 20}));
  CHECK(repetition_flag(toks({7, 7, 7})));
  CHECK_FALSE(repetition_flag({}));
  CHECK_THROWS_AS(repetition_flag(toks({1}), {1, 20}), InvalidConfig);
}

TEST_CASE("repetition agrees with the block oracle") {
  Rng rng(29);
  int flagged = 0;
  for (int i = 0; i < 300; ++i) {
    const auto seq = oracle::random_tokens(rng);
    const bool got = repetition_flag(seq);
    CHECK(got == oracle::repetition(seq, 3, 20));
    flagged += got;
  }
  CHECK(flagged > 10);
}

TEST_CASE("accumulator merge is order independent") {
  auto part = [](std::size_t hallu, std::size_t all, std::size_t distinct) {
    MetricAccumulator::PromptPart p;
    p.generations = 2;
    p.checkworthy = 2;
    p.all_ne = all;
    p.hallu_ne = hallu;
    p.entail_evaluated = 2;
    p.entailed = 1;
    p.ngrams = {distinct, 10};
    p.perplexities = {2.0, 4.0};
    return p;
  };
  MetricAccumulator a, b, c;
  a.add("p1", part(1, 4, 7));
  b.add("p2", part(0, 3, 9));
  c.add("p3", part(2, 2, 3));

  MetricAccumulator x = a;
  x.merge(b);
  x.merge(c);
  MetricAccumulator y = c;
  y.merge(a);
  y.merge(b);
  FactualityReport rx, ry;
  x.finalize(rx);
  y.finalize(ry);
  CHECK(serialize_report(rx) == serialize_report(ry));
  CHECK(rx.ne_error == doctest::Approx(3.0 / 9.0));
  CHECK(rx.entail_ratio == 0.5);
  CHECK(rx.diversity == doctest::Approx((0.7 + 0.9 + 0.3) / 3.0));
  CHECK(rx.mean_perplexity == 3.0);
  CHECK_THROWS(x.merge(a));
}
