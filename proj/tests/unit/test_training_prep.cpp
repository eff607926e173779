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

#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "facdec/errors.hpp"
#include "facdec/training_prep.hpp"
#include "json.hpp"

using namespace facdec;

namespace {

KnowledgeStore two_docs() {
  std::vector<KnowledgeDoc> docs;
  docs.push_back(make_knowledge_doc(
      "obama", "Barack Obama",
      {"He was the first African-American president of the United States.",
       "He was born in Hawaii."}));
  docs.push_back(make_knowledge_doc("curie", "Marie Curie",
                                    {"She was a physicist.", "She lived in Paris.",
                                     "She won two Nobel prizes."}));
  return KnowledgeStore(std::move(docs));
}

std::string dump(const PrepareResult& r) {
  std::ostringstream ss;
  write_records(ss, r.records);
  return ss.str();
}

}  // namespace

TEST_CASE("topic prefix rendering") {
  const auto doc = make_knowledge_doc(
      "obama", "Barack Obama",
      {"He was the first African-American president of the United States.", "b.", "c."});
  const auto lines = topic_prefix(doc);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].rendered ==
        "Barack Obama ==> He was the first African-American president of the United States.");
  const auto back = split_prefixed(lines[0].rendered);
  REQUIRE(back.has_value());
  CHECK(back->topic == "Barack Obama");
  CHECK(back->sentence == doc.sentences[0]);
  CHECK_FALSE(split_prefixed("no separator").has_value());
  CHECK_THROWS_AS(topic_prefix(make_knowledge_doc("x", "  ", {"s."})), EmptyTitle);
}

TEST_CASE("SC_HALF pivots") {
  CHECK(sc_pivot(10, PivotStrategy::kHalf) == 5);
  CHECK(sc_pivot(1, PivotStrategy::kHalf) == 0);
  CHECK(sc_pivot(7, PivotStrategy::kHalf) == 3);
  CHECK(sc_pivot(0, PivotStrategy::kHalf) == 0);
}

TEST_CASE("SC_RANDOM pivots") {
  CHECK_THROWS_AS(sc_pivot(10, PivotStrategy::kRandom), MissingSeed);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto p = sc_pivot(100, PivotStrategy::kRandom, seed);
    CHECK(p >= 25);
    CHECK(p < 75);
  }
  CHECK(sc_pivot(100, PivotStrategy::kRandom, 7) == sc_pivot(100, PivotStrategy::kRandom, 7));
}

TEST_CASE("SC_ROOT pivots") {
  CHECK(sc_pivot(7, PivotStrategy::kRoot, std::nullopt, 3) == 3);
  CHECK_THROWS_AS(sc_pivot(7, PivotStrategy::kRoot), MissingRootIndex);
  CHECK_THROWS_AS(sc_pivot(7, PivotStrategy::kRoot, std::nullopt, 7), PivotOutOfRange);
}

TEST_CASE("loss masks") {
  const auto m = loss_mask(10, 5, PivotStrategy::kHalf);
  CHECK(m.mask == std::vector<std::uint8_t>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  CHECK(m.unmasked() == 5);

  const auto all = loss_mask(4, 0, PivotStrategy::kHalf);
  CHECK(all.mask == std::vector<std::uint8_t>{1, 1, 1, 1});

  const auto none = loss_mask(4, 4, PivotStrategy::kRoot);
  CHECK(none.mask == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK(none.contributes_no_loss());
  CHECK_THROWS_AS(loss_mask(4, 5, PivotStrategy::kHalf), PivotOutOfRange);
}

TEST_CASE("prepare_corpus with SC_HALF") {
  const auto r = prepare_corpus(two_docs(), {});
  REQUIRE(r.records.size() == 5);
  const auto& first = r.records[0];
  CHECK(first.text.rfind("Barack Obama ==> ", 0) == 0);
  // Prefix tokens: "Barack", "Obama", "==>".
  CHECK(first.tokens[0] == "Barack");
  CHECK(first.tokens[2] == "==>");
  CHECK(first.mask.size() == first.tokens.size());
  CHECK(first.mask[0] == 0);
  CHECK(first.mask[2] == 0);
  const std::size_t sentence_len = first.tokens.size() - 3;
  CHECK(first.pivot == sentence_len / 2);
  std::size_t ones = 0;
  for (auto b : first.mask) ones += b;
  CHECK(ones == sentence_len - sentence_len / 2);
  CHECK(r.no_loss.empty());
}

TEST_CASE("prepare_corpus with SC_RANDOM is deterministic") {
  PrepareOptions o;
  o.strategy = PivotStrategy::kRandom;
  o.seed = 99;
  const auto a = dump(prepare_corpus(two_docs(), o));
  const auto b = dump(prepare_corpus(two_docs(), o));
  CHECK(a == b);
  o.seed = 100;
  CHECK(dump(prepare_corpus(two_docs(), o)) != a);
}

TEST_CASE("prepare_corpus with SC_ROOT") {
  std::istringstream roots_in(
      R"({"doc_id":"obama","sent_idx":0,"root_index":1})"
      "\n"
      R"({"doc_id":"obama","sent_idx":1,"root_index":3})");
  const auto roots = parse_root_annotations(roots_in);
  std::vector<KnowledgeDoc> docs;
  docs.push_back(make_knowledge_doc("obama", "Barack Obama",
                                    {"He was the president.", "He was born in sunny Hawaii."}));
  const KnowledgeStore store(std::move(docs));
  PrepareOptions o;
  o.strategy = PivotStrategy::kRoot;
  o.roots = &roots;
  const auto r = prepare_corpus(store, o);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[1].pivot == 3);

  std::vector<KnowledgeDoc> seven;
  seven.push_back(make_knowledge_doc("d", "T", {"one two three four five six seven"}));
  std::istringstream r7(R"({"doc_id":"d","sent_idx":0,"root_index":3})");
  const auto roots7 = parse_root_annotations(r7);
  o.roots = &roots7;
  const auto rr = prepare_corpus(KnowledgeStore(std::move(seven)), o);
  CHECK(rr.records[0].pivot == 3);

  std::istringstream partial(R"({"doc_id":"obama","sent_idx":0,"root_index":1})");
  const auto missing = parse_root_annotations(partial);
  o.roots = &missing;
  CHECK_THROWS_AS(prepare_corpus(store, o), MissingRootAnnotation);
  o.roots = nullptr;
  CHECK_THROWS_AS(prepare_corpus(store, o), MissingRootIndex);
}

TEST_CASE("fully masked sentences are reported") {
  std::vector<KnowledgeDoc> docs;
  docs.push_back(make_knowledge_doc("d", "T", {"one two three"}));
  std::istringstream in(R"({"doc_id":"d","sent_idx":0,"root_index":2})");
  const auto roots = parse_root_annotations(in);
  PrepareOptions o;
  o.strategy = PivotStrategy::kRoot;
  o.roots = &roots;
  // Root 2 keeps one token; no sentence is silent.
  CHECK(prepare_corpus(KnowledgeStore(std::move(docs)), o).no_loss.empty());

  // A custom tokenizer that drops the sentence entirely yields L=0.
  std::vector<KnowledgeDoc> empty;
  empty.push_back(make_knowledge_doc("e", "T", {"..."}));
  PrepareOptions h;
  h.tokenizer = [](std::string_view s) {
    return s == "..." ? std::vector<std::string>{} : whitespace_tokenizer(s);
  };
  const auto r = prepare_corpus(KnowledgeStore(std::move(empty)), h);
  REQUIRE(r.no_loss.size() == 1);
  CHECK(r.no_loss[0].first == "e");
}

TEST_CASE("record serialization") {
  const auto r = prepare_corpus(two_docs(), {});
  const auto j = nlohmann::json::parse(serialize_record(r.records[2]));
  CHECK(j.at("doc_id") == "curie");
  CHECK(j.at("sent_idx") == 0);
  CHECK(j.at("strategy") == "SC_HALF");
  CHECK(j.at("tokens").size() == j.at("mask").size());
  CHECK(j.at("text") == "Marie Curie ==> She was a physicist.");
}

TEST_CASE("strategy names") {
  CHECK(parse_pivot_strategy("half") == PivotStrategy::kHalf);
  CHECK(parse_pivot_strategy("SC_RANDOM") == PivotStrategy::kRandom);
  CHECK(to_string(PivotStrategy::kRoot) == "SC_ROOT");
  CHECK_THROWS_AS(parse_pivot_strategy("middle"), InvalidConfig);
}
