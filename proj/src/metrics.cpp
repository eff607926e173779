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

#include "facdec/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "facdec/errors.hpp"
#include "facdec/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace facdec {
namespace {

using json = nlohmann::json;

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string post_json(const std::string& base_url, const std::string& path,
                      const json& body, double timeout_seconds,
                      const char* what) {
  httplib::Client client(base_url);
  const auto secs = static_cast<time_t>(timeout_seconds);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw ProviderUnavailable(std::string(what) + ": cannot reach " + base_url + path +
                              ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderUnavailable(std::string(what) + ": " + path + " returned HTTP " +
                              std::to_string(res->status));
  }
  return res->body;
}

struct VectorHash {
  std::size_t operator()(std::span<const TokenId> v) const {
    std::size_t h = 0xCBF29CE484222325ULL;
    for (TokenId t : v) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(t));
      h *= 0x100000001B3ULL;
    }
    return h;
  }
};

struct SpanEq {
  bool operator()(std::span<const TokenId> a, std::span<const TokenId> b) const {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace

// ---- word lists ----------------------------------------------------------

const WordSet& default_stopwords() {
  static const WordSet words = {
#include "stopwords_data.inc"
  };
  return words;
}

WordSet load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  WordSet out;
  std::string line;
  while (std::getline(in, line)) {
    auto w = text::trim(line);
    if (!w.empty()) out.insert(std::move(w));
  }
  return out;
}

std::vector<std::string> content_words(std::string_view text, const WordSet& stopwords) {
  auto words = text::word_tokens(text);
  std::erase_if(words, [&](const std::string& w) { return stopwords.count(w) > 0; });
  return words;
}

// ---- named entities ------------------------------------------------------

NamedEntity make_entity(std::string surface, std::string label, const WordSet& stopwords) {
  NamedEntity e;
  e.content_tokens = content_words(surface, stopwords);
  const auto& toks = e.content_tokens;
  for (std::size_t n = 1; n <= toks.size(); ++n) {
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      std::vector<std::string> gram(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                    toks.begin() + static_cast<std::ptrdiff_t>(i + n));
      e.token_ngrams.push_back(text::join(gram, " "));
    }
  }
  std::sort(e.token_ngrams.begin(), e.token_ngrams.end());
  e.token_ngrams.erase(std::unique(e.token_ngrams.begin(), e.token_ngrams.end()),
                       e.token_ngrams.end());
  e.surface = std::move(surface);
  e.label = std::move(label);
  return e;
}

DocumentTokens::DocumentTokens(std::string_view doc_text, const WordSet& stopwords)
    : stream_(content_words(doc_text, stopwords)), words_(stream_.begin(), stream_.end()) {}

bool ne_match(const NamedEntity& entity, const DocumentTokens& doc) {
  // Any n-gram occurring contiguously implies each of its words occurs, and
  // every single word is itself a 1-gram, so the n-gram test reduces to a
  // membership test over the entity's content words.
  return std::any_of(entity.content_tokens.begin(), entity.content_tokens.end(),
                     [&](const std::string& w) { return doc.contains(w); });
}

bool ne_match(const NamedEntity& entity, std::string_view doc_text) {
  return ne_match(entity, DocumentTokens(doc_text));
}

Gazetteer::Gazetteer(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const std::string& s = entries_[i].surface;
    std::size_t j = 0;
    while (j < s.size() && is_word_byte(static_cast<unsigned char>(s[j]))) ++j;
    if (j == 0) continue;  // must start with a word character
    by_first_word_[s.substr(0, j)].push_back(i);
  }
  for (auto& [_, idx] : by_first_word_) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return entries_[a].surface.size() > entries_[b].surface.size();
    });
  }
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<Entry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    Entry e;
    e.surface = text::trim(line.substr(0, tab));
    if (tab != std::string::npos) {
      auto label = text::trim(line.substr(tab + 1));
      if (!label.empty()) e.label = std::move(label);
    }
    if (!e.surface.empty()) entries.push_back(std::move(e));
  }
  return Gazetteer(std::move(entries));
}

std::vector<EntitySpan> Gazetteer::find(std::string_view text) const {
  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t word_end = i;
    while (word_end < text.size() && is_word_byte(static_cast<unsigned char>(text[word_end]))) {
      ++word_end;
    }
    bool matched = false;
    auto bucket = by_first_word_.find(text.substr(i, word_end - i));
    if (bucket != by_first_word_.end()) {
      for (std::size_t idx : bucket->second) {
        const Entry& e = entries_[idx];
        const std::size_t end = i + e.surface.size();
        if (end > text.size() || text.compare(i, e.surface.size(), e.surface) != 0) continue;
        const bool boundary = end == text.size() ||
                              !is_word_byte(static_cast<unsigned char>(text[end])) ||
                              !is_word_byte(static_cast<unsigned char>(e.surface.back()));
        if (!boundary) continue;
        spans.push_back({i, end, e.label});
        i = end;
        matched = true;
        break;
      }
    }
    if (!matched) i = word_end;
  }
  return spans;
}

HttpNer::HttpNer(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

std::vector<EntitySpan> HttpNer::find(std::string_view text) const {
  json req;
  req["text"] = std::string(text);
  json j = json::parse(post_json(base_url_, "/ner", req, timeout_seconds_, "NER"), nullptr,
                       false);
  if (j.is_discarded() || !j.contains("entities") || !j["entities"].is_array()) {
    throw ProviderUnavailable("NER: malformed /ner response");
  }
  std::vector<EntitySpan> spans;
  try {
    for (const auto& e : j["entities"]) {
      EntitySpan s{e.at("start").get<std::size_t>(), e.at("end").get<std::size_t>(),
                   e.value("label", std::string("ENTITY"))};
      if (s.start >= s.end || s.end > text.size()) {
        throw InvalidSpan("NER span [" + std::to_string(s.start) + ", " +
                          std::to_string(s.end) + ") outside text");
      }
      spans.push_back(std::move(s));
    }
  } catch (const json::exception& ex) {
    throw ProviderUnavailable(std::string("NER: malformed entity: ") + ex.what());
  }
  std::sort(spans.begin(), spans.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
  return spans;
}

std::vector<NamedEntity> detect_entities(std::string_view text, const NeProvider& provider,
                                         const WordSet& stopwords) {
  std::vector<NamedEntity> out;
  for (const auto& s : provider.find(text)) {
    if (s.start > s.end || s.end > text.size()) throw InvalidSpan("entity span outside text");
    std::string surface(text.substr(s.start, s.end - s.start));
    if (surface.empty()) continue;
    out.push_back(make_entity(std::move(surface), s.label, stopwords));
  }
  return out;
}

NeCounts count_hallucinated(std::span<const NamedEntity> entities,
                            std::span<const DocumentTokens> docs) {
  NeCounts c;
  for (const auto& e : entities) {
    ++c.all;
    const bool supported = std::any_of(docs.begin(), docs.end(),
                                       [&](const DocumentTokens& d) { return ne_match(e, d); });
    if (!supported) ++c.hallucinated;
  }
  return c;
}

double ne_error(std::span<const EntityCheck> generations) {
  NeCounts total;
  for (const auto& g : generations) {
    const NeCounts c = count_hallucinated(g.entities, g.docs);
    total.all += c.all;
    total.hallucinated += c.hallucinated;
  }
  if (total.all == 0) throw NoEntitiesInCorpus();
  return static_cast<double>(total.hallucinated) / static_cast<double>(total.all);
}

// ---- entailment ----------------------------------------------------------

std::string_view to_string(EntailmentClass c) {
  switch (c) {
    case EntailmentClass::kEntailment:
      return "entailment";
    case EntailmentClass::kNeutral:
      return "neutral";
    case EntailmentClass::kContradiction:
      return "contradiction";
  }
  return "unknown";
}

HttpNli::HttpNli(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

EntailmentLabel HttpNli::classify(std::string_view premise, std::string_view hypothesis) const {
  json req;
  req["premise"] = std::string(premise);
  req["hypothesis"] = std::string(hypothesis);
  std::string body;
  try {
    body = post_json(base_url_, "/nli", req, timeout_seconds_, "NLI");
  } catch (const ProviderUnavailable& e) {
    throw NliUnavailable(e.what());
  }
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw NliUnavailable("malformed /nli response");
  EntailmentLabel out;
  try {
    std::string label = j.at("label").get<std::string>();
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (label == "entailment") {
      out.label = EntailmentClass::kEntailment;
    } else if (label == "neutral") {
      out.label = EntailmentClass::kNeutral;
    } else if (label == "contradiction") {
      out.label = EntailmentClass::kContradiction;
    } else {
      throw NliUnavailable("unknown NLI label: " + label);
    }
    const auto probs = j.at("probs").get<std::vector<double>>();
    if (probs.size() != 3) throw NliUnavailable("NLI probs must have 3 entries");
    std::copy(probs.begin(), probs.end(), out.probs.begin());
  } catch (const json::exception& e) {
    throw NliUnavailable(std::string("malformed /nli response: ") + e.what());
  }
  const double sum = out.probs[0] + out.probs[1] + out.probs[2];
  if (std::abs(sum - 1.0) > 1e-4) throw NliUnavailable("NLI probs do not sum to 1");
  const auto arg = static_cast<std::size_t>(
      std::max_element(out.probs.begin(), out.probs.end()) - out.probs.begin());
  if (out.probs[arg] > out.probs[static_cast<std::size_t>(out.label)] + 1e-12) {
    throw NliUnavailable("NLI label disagrees with argmax of probs");
  }
  return out;
}

EntailmentLabel LexicalNli::classify(std::string_view premise,
                                     std::string_view hypothesis) const {
  const auto premise_words = content_words(premise, stopwords_);
  const WordSet have(premise_words.begin(), premise_words.end());
  const auto hyp = content_words(hypothesis, stopwords_);
  const bool covered = !hyp.empty() && std::all_of(hyp.begin(), hyp.end(), [&](const auto& w) {
    return have.count(w) > 0;
  });
  EntailmentLabel out;
  if (covered) {
    out.label = EntailmentClass::kEntailment;
    out.probs = {1.0, 0.0, 0.0};
  }
  return out;
}

std::string entailment_hypothesis(std::string_view generation_text, const NeProvider& ner) {
  const auto sentences = text::split_sentences(generation_text);
  if (sentences.empty()) return {};
  for (const auto& s : sentences) {
    const auto spans = ner.find(s);
    if (is_checkworthy(s, spans).checkworthy) return text::utf8_truncate(s, kHypothesisMaxBytes);
  }
  return text::utf8_truncate(sentences.front(), kHypothesisMaxBytes);
}

bool is_entailed(const EntailmentInput& input, const NliProvider& nli) {
  if (input.premises.empty()) throw EmptyEvidence("generation has no evidence sentence");
  return std::any_of(input.premises.begin(), input.premises.end(), [&](const std::string& p) {
    return nli.classify(p, input.hypothesis).label == EntailmentClass::kEntailment;
  });
}

EntailmentCounts count_entailed(std::span<const EntailmentInput> inputs, const NliProvider& nli) {
  EntailmentCounts c;
  for (const auto& in : inputs) {
    if (in.premises.empty()) {
      ++c.empty_evidence;
      continue;
    }
    ++c.evaluated;
    if (is_entailed(in, nli)) ++c.entailed;
  }
  return c;
}

double entail_ratio(std::span<const EntailmentInput> inputs, const NliProvider& nli) {
  return count_entailed(inputs, nli).ratio();
}

// ---- diversity and repetition --------------------------------------------

NgramStats group_ngram_stats(const TokenGroup& group, int n) {
  if (n < 1) throw InvalidConfig("n-gram order must be >= 1");
  const auto un = static_cast<std::size_t>(n);
  std::unordered_set<std::span<const TokenId>, VectorHash, SpanEq> seen;
  NgramStats s;
  for (const auto& gen : group) {
    if (gen.size() < un) continue;
    for (std::size_t i = 0; i + un <= gen.size(); ++i) {
      ++s.total;
      seen.insert(gen.subspan(i, un));
    }
  }
  s.distinct = seen.size();
  return s;
}

double diversity(std::span<const TokenGroup> groups, int n) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& g : groups) {
    const NgramStats s = group_ngram_stats(g, n);
    if (s.total == 0) continue;
    sum += s.ratio();
    ++counted;
  }
  return counted ? sum / static_cast<double>(counted) : 0.0;
}

bool repetition_flag(std::span<const TokenId> tokens, RepetitionParams params) {
  if (params.min_copies < 2 || params.max_period < 1) {
    throw InvalidConfig("repetition needs min_copies >= 2 and max_period >= 1");
  }
  const std::size_t len = tokens.size();
  const auto copies = static_cast<std::size_t>(params.min_copies);
  for (std::size_t k = 1; k <= static_cast<std::size_t>(params.max_period); ++k) {
    const std::size_t span = copies * k;
    if (span > len) break;
    // The tail is periodic with period k iff every token matches the one k
    // positions before it, across the whole copies*k window.
    bool periodic = true;
    for (std::size_t j = len - span + k; j < len; ++j) {
      if (tokens[j] != tokens[j - k]) {
        periodic = false;
        break;
      }
    }
    if (periodic) return true;
  }
  return false;
}

// ---- accumulation --------------------------------------------------------

void MetricAccumulator::add(const std::string& prompt_id, PromptPart part) {
  if (!parts_.emplace(prompt_id, std::move(part)).second) {
    throw Error("prompt accumulated twice: " + prompt_id);
  }
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
  for (const auto& [id, part] : other.parts_) {
    if (parts_.count(id)) throw Error("prompt accumulated twice: " + id);
  }
  for (const auto& [id, part] : other.parts_) parts_.emplace(id, part);
}

void MetricAccumulator::finalize(FactualityReport& report) const {
  ReportCounts c;
  std::size_t entail_evaluated = 0;
  double diversity_sum = 0.0;
  std::size_t diversity_groups = 0;
  double ppl_sum = 0.0;
  std::size_t ppl_count = 0;
  for (const auto& [id, part] : parts_) {
    ++c.prompts;
    c.generations += part.generations;
    c.checkworthy += part.checkworthy;
    c.all_ne += part.all_ne;
    c.hallu_ne += part.hallu_ne;
    c.entailed += part.entailed;
    c.empty_evidence += part.empty_evidence;
    c.repeated += part.repeated;
    entail_evaluated += part.entail_evaluated;
    if (part.ngrams.total > 0) {
      diversity_sum += part.ngrams.ratio();
      ++diversity_groups;
    }
    for (double p : part.perplexities) {
      ppl_sum += p;
      ++ppl_count;
    }
  }
  report.counts = c;
  auto ratio = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  report.ne_error = ratio(c.hallu_ne, c.all_ne);
  report.entail_ratio = ratio(c.entailed, entail_evaluated);
  report.diversity = diversity_groups ? diversity_sum / static_cast<double>(diversity_groups) : 0.0;
  report.repetition = ratio(c.repeated, c.generations);
  report.mean_perplexity = ppl_count ? ppl_sum / static_cast<double>(ppl_count) : 0.0;
}

}  // namespace facdec
