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

// Wire clients against in-process stub servers.

#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "facdec/decoder.hpp"
#include "facdec/errors.hpp"
#include "facdec/lm.hpp"
#include "facdec/metrics.hpp"
#include "facdec/retrieval.hpp"
#include "json.hpp"
#include "stub_server.hpp"

using namespace facdec;
using json = nlohmann::json;
using facdec::testing::StubServer;

namespace {

void reply(httplib::Response& res, const json& j) { res.set_content(j.dump(), "application/json"); }

// Serves a local model over the logits protocol.
void serve_model(StubServer& s, const LanguageModel& m) {
  s.server().Post("/vocab", [&m](const httplib::Request&, httplib::Response& res) {
    json j;
    j["tokens"] = std::vector<std::string>(m.vocab().tokens().begin(), m.vocab().tokens().end());
    j["sentence_end_ids"] = m.vocab().sentence_end_ids();
    reply(res, j);
  });
  s.server().Post("/next_token_dist", [&m](const httplib::Request& req, httplib::Response& res) {
    const auto ctx = json::parse(req.body).at("context").get<std::vector<TokenId>>();
    json lp = json::array();
    for (double p : m.next_distribution(ctx).probs) {
      if (p > 0) {
        lp.push_back(std::log(p));
      } else {
        lp.push_back(nullptr);
      }
    }
    reply(res, {{"logprobs", lp}});
  });
}

}  // namespace

TEST_CASE("logits protocol round trip") {
  const auto local = TableModel::load(FACDEC_DATA_DIR "/example/tiny_lm.json");
  StubServer s;
  serve_model(s, local);
  s.start();

  const HttpModel remote(s.url());
  CHECK(remote.vocab().size() == local.vocab().size());
  CHECK(remote.vocab().end_of_text() == local.vocab().end_of_text());
  CHECK(remote.vocab().sentence_end_ids() == local.vocab().sentence_end_ids());

  const auto prompt = local.vocab().encode("Barack Obama was born in");
  const auto a = local.next_distribution(prompt);
  const auto b = remote.next_distribution(prompt);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.probs[i] == doctest::Approx(a.probs[i]));

  DecodeConfig c;
  c.algorithm = DecodeAlgorithm::kFactualNucleus;
  c.lambda = 0.9;
  c.omega = 0.3;
  c.max_new_tokens = 20;
  CHECK(decode(local, prompt, c, 5).tokens == decode(remote, prompt, c, 5).tokens);
}

TEST_CASE("logits protocol errors") {
  CHECK_THROWS_AS(HttpModel(testing::dead_url(), 2.0), BackendUnavailable);

  StubServer s;
  s.server().Post("/vocab", [](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"tokens", {"a", "b"}}, {"sentence_end_ids", json::array()}});
  });
  s.server().Post("/next_token_dist", [](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"logprobs", {0.0}}});
  });
  s.start();
  const HttpModel m(s.url());
  const std::vector<TokenId> ctx{0};
  CHECK_THROWS_AS(m.next_distribution(ctx), BackendUnavailable);
}

TEST_CASE("NER protocol") {
  StubServer s;
  s.server().Post("/ner", [](const httplib::Request& req, httplib::Response& res) {
    const std::string text = json::parse(req.body).at("text");
    json ents = json::array();
    for (const std::string w : {"Barack Obama", "Hawaii"}) {
      const auto pos = text.find(w);
      if (pos == std::string::npos) continue;
      ents.push_back({{"start", pos}, {"end", pos + w.size()}, {"label", "X"}, {"text", w}});
    }
    // Deliberately out of order.
    std::reverse(ents.begin(), ents.end());
    reply(res, {{"entities", ents}});
  });
  s.start();
  const HttpNer ner(s.url());
  const std::string text = "Barack Obama visited Hawaii";
  const auto spans = ner.find(text);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 12);
  CHECK(spans[1].start == 21);
  const auto entities = detect_entities(text, ner);
  CHECK(entities[1].surface == "Hawaii");
}

TEST_CASE("NER spans are validated") {
  StubServer s;
  s.server().Post("/ner", [](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"entities", {{{"start", 2}, {"end", 99}, {"label", "X"}, {"text", "?"}}}}});
  });
  s.start();
  CHECK_THROWS_AS(HttpNer(s.url()).find("short"), InvalidSpan);
  CHECK_THROWS_AS(HttpNer(testing::dead_url(), 2.0).find("x"), ProviderUnavailable);
}

TEST_CASE("NLI protocol") {
  StubServer s;
  s.server().Post("/nli", [](const httplib::Request& req, httplib::Response& res) {
    const auto j = json::parse(req.body);
    if (j.at("premise") == j.at("hypothesis")) {
      reply(res, {{"label", "entailment"}, {"probs", {0.9, 0.08, 0.02}}});
    } else if (j.at("hypothesis") == "bad") {
      reply(res, {{"label", "entailment"}, {"probs", {0.1, 0.8, 0.1}}});
    } else {
      reply(res, {{"label", "NEUTRAL"}, {"probs", {0.2, 0.7, 0.1}}});
    }
  });
  s.start();
  const HttpNli nli(s.url());
  const auto same = nli.classify("Obama was born in Hawaii.", "Obama was born in Hawaii.");
  CHECK(same.label == EntailmentClass::kEntailment);
  CHECK(same.probs[0] == 0.9);
  CHECK(nli.classify("a", "b").label == EntailmentClass::kNeutral);
  // Label must agree with the most probable class.
  CHECK_THROWS_AS(nli.classify("a", "bad"), NliUnavailable);
  CHECK_THROWS_AS(HttpNli(testing::dead_url(), 2.0).classify("a", "b"), NliUnavailable);
}

TEST_CASE("embedding protocol and memo") {
  std::atomic<int> texts_seen{0};
  StubServer s;
  s.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
    const auto texts = json::parse(req.body).at("texts").get<std::vector<std::string>>();
    texts_seen += static_cast<int>(texts.size());
    json vecs = json::array();
    for (const auto& t : texts) vecs.push_back({static_cast<double>(t.size()), 1.0});
    reply(res, {{"vectors", vecs}});
  });
  s.start();
  HttpEmbedder e(s.url());
  const std::vector<std::string> batch{"ab", "abcd", "ab"};
  const auto v = e.embed(batch);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == std::vector<double>{4.0, 1.0});
  const int after_first = texts_seen.load();
  e.embed(batch);
  CHECK(texts_seen.load() == after_first);

  const std::vector<std::string> cands{"abcd", "ab"};
  CHECK(embed_retrieve("ab", cands, e).index == 1);

  HttpEmbedder down(testing::dead_url(), 2.0);
  CHECK_THROWS_AS(down.embed(batch), EmbedderUnavailable);
}
