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

#include "facdec/training_prep.hpp"

#include <cmath>
#include <fstream>

#include "facdec/errors.hpp"
#include "facdec/rng.hpp"
#include "facdec/text.hpp"
#include "json.hpp"

namespace facdec {

PrefixedSentence make_prefixed(std::string topic, std::string sentence) {
  PrefixedSentence p;
  p.rendered = topic + std::string(kTopicSeparator) + sentence;
  p.topic = std::move(topic);
  p.sentence = std::move(sentence);
  return p;
}

std::optional<PrefixedSentence> split_prefixed(std::string_view rendered) {
  const auto pos = rendered.find(kTopicSeparator);
  if (pos == std::string_view::npos) return std::nullopt;
  return PrefixedSentence{std::string(rendered.substr(0, pos)),
                          std::string(rendered.substr(pos + kTopicSeparator.size())),
                          std::string(rendered)};
}

std::vector<PrefixedSentence> topic_prefix(const KnowledgeDoc& doc) {
  if (text::trim(doc.title).empty()) throw EmptyTitle(doc.doc_id);
  std::vector<PrefixedSentence> out;
  out.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences) out.push_back(make_prefixed(doc.title, s));
  return out;
}

std::string_view to_string(PivotStrategy s) {
  switch (s) {
    case PivotStrategy::kHalf:
      return "SC_HALF";
    case PivotStrategy::kRandom:
      return "SC_RANDOM";
    case PivotStrategy::kRoot:
      return "SC_ROOT";
  }
  return "UNKNOWN";
}

PivotStrategy parse_pivot_strategy(std::string_view s) {
  if (s == "half" || s == "SC_HALF") return PivotStrategy::kHalf;
  if (s == "random" || s == "SC_RANDOM") return PivotStrategy::kRandom;
  if (s == "root" || s == "SC_ROOT") return PivotStrategy::kRoot;
  throw InvalidConfig("unknown pivot strategy: " + std::string(s));
}

std::size_t sc_pivot(std::size_t sentence_token_count, PivotStrategy strategy,
                     std::optional<std::uint64_t> rng_seed,
                     std::optional<std::size_t> root_index) {
  const std::size_t len = sentence_token_count;
  switch (strategy) {
    case PivotStrategy::kHalf:
      return len / 2;
    case PivotStrategy::kRandom: {
      if (!rng_seed) throw MissingSeed();
      Rng rng(splitmix64(*rng_seed));
      const double u = 0.25 + 0.5 * rng.uniform01();
      const auto pivot = static_cast<std::size_t>(std::floor(u * static_cast<double>(len)));
      return std::min(pivot, len);
    }
    case PivotStrategy::kRoot:
      if (!root_index) throw MissingRootIndex();
      if (*root_index >= len) throw PivotOutOfRange(*root_index, len);
      return *root_index;
  }
  throw InvalidConfig("unknown pivot strategy");
}

LossMask loss_mask(std::size_t token_count, std::size_t pivot, PivotStrategy strategy) {
  if (pivot > token_count) throw PivotOutOfRange(pivot, token_count);
  LossMask m;
  m.pivot = pivot;
  m.strategy = strategy;
  m.mask.assign(token_count, 1);
  std::fill(m.mask.begin(), m.mask.begin() + static_cast<std::ptrdiff_t>(pivot), 0);
  return m;
}

std::uint64_t sentence_seed(std::uint64_t seed, std::string_view doc_id, std::size_t sent_idx) {
  return hash_combine(hash_combine(seed, fnv1a64(doc_id)), sent_idx);
}

RootAnnotations parse_root_annotations(std::istream& in) {
  using json = nlohmann::json;
  RootAnnotations out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw MalformedRecord(line_no, "not a JSON object");
    try {
      out[{j.at("doc_id").get<std::string>(), j.at("sent_idx").get<std::size_t>()}] =
          j.at("root_index").get<std::size_t>();
    } catch (const json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return out;
}

RootAnnotations load_root_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_root_annotations(in);
}

std::vector<std::string> whitespace_tokenizer(std::string_view text) {
  return text::split_whitespace(text);
}

PrepareResult prepare_corpus(const KnowledgeStore& store, const PrepareOptions& options) {
  if (options.strategy == PivotStrategy::kRoot && !options.roots) {
    throw MissingRootIndex();
  }
  PrepareResult result;
  for (const KnowledgeDoc& doc : store.docs()) {
    const auto prefixed = topic_prefix(doc);
    const auto prefix_tokens =
        options.tokenizer(doc.title + std::string(kTopicSeparator));
    for (std::size_t idx = 0; idx < prefixed.size(); ++idx) {
      const auto sentence_tokens = options.tokenizer(prefixed[idx].sentence);
      const std::size_t len = sentence_tokens.size();
      std::size_t pivot = 0;
      switch (options.strategy) {
        case PivotStrategy::kHalf:
          pivot = sc_pivot(len, PivotStrategy::kHalf);
          break;
        case PivotStrategy::kRandom:
          pivot = sc_pivot(len, PivotStrategy::kRandom,
                           sentence_seed(options.seed, doc.doc_id, idx));
          break;
        case PivotStrategy::kRoot: {
          auto it = options.roots->find({doc.doc_id, idx});
          if (it == options.roots->end()) throw MissingRootAnnotation(doc.doc_id, idx);
          pivot = sc_pivot(len, PivotStrategy::kRoot, std::nullopt, it->second);
          break;
        }
      }
      const LossMask m = loss_mask(len, pivot, options.strategy);
      if (m.contributes_no_loss()) result.no_loss.emplace_back(doc.doc_id, idx);

      TrainingRecord r;
      r.doc_id = doc.doc_id;
      r.sent_idx = idx;
      r.text = prefixed[idx].rendered;
      r.tokens = prefix_tokens;
      r.tokens.insert(r.tokens.end(), sentence_tokens.begin(), sentence_tokens.end());
      r.mask.assign(prefix_tokens.size(), 0);
      r.mask.insert(r.mask.end(), m.mask.begin(), m.mask.end());
      r.pivot = pivot;
      r.strategy = options.strategy;
      result.records.push_back(std::move(r));
    }
  }
  return result;
}

std::string serialize_record(const TrainingRecord& r) {
  nlohmann::ordered_json j;
  j["doc_id"] = r.doc_id;
  j["sent_idx"] = r.sent_idx;
  j["text"] = r.text;
  j["tokens"] = r.tokens;
  j["mask"] = r.mask;
  j["pivot"] = r.pivot;
  j["strategy"] = to_string(r.strategy);
  return j.dump();
}

void write_records(std::ostream& out, const std::vector<TrainingRecord>& records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

}  // namespace facdec
