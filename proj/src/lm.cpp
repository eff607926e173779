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

#include "facdec/lm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "facdec/errors.hpp"
#include "facdec/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace facdec {
namespace {

using json = nlohmann::json;

bool is_attached_punct(std::string_view tok) {
  return tok == "." || tok == "," || tok == "!" || tok == "?" || tok == ";" ||
         tok == ":";
}

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---- Vocabulary ----------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> tokens,
                       const std::vector<std::string>& sentence_end,
                       std::optional<std::string> end_of_text)
    : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!id_of_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw InvalidConfig("duplicate vocabulary entry: " + tokens_[i]);
    }
  }
  for (const auto& s : sentence_end) {
    if (auto id = find(s)) sentence_end_.push_back(*id);
  }
  std::sort(sentence_end_.begin(), sentence_end_.end());
  if (end_of_text) {
    eot_ = find(*end_of_text);
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (!valid(id)) throw UnknownToken("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = id_of_.find(std::string(token));
  if (it == id_of_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id_of(std::string_view token) const {
  if (auto id = find(token)) return *id;
  throw UnknownToken("unknown token: " + std::string(token));
}

bool Vocabulary::is_sentence_end(TokenId id) const {
  return std::binary_search(sentence_end_.begin(), sentence_end_.end(), id);
}

void Vocabulary::set_sentence_end_ids(std::vector<TokenId> ids) {
  for (TokenId id : ids) {
    if (!valid(id)) {
      throw UnknownToken("sentence-end id out of range: " + std::to_string(id));
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  sentence_end_ = std::move(ids);
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  const std::optional<TokenId> unk = find("<unk>");
  std::vector<TokenId> out;
  for (const auto& word : text::split_whitespace(text)) {
    if (auto id = find(word)) {
      out.push_back(*id);
      continue;
    }
    std::string_view stem = word;
    std::vector<TokenId> tail;
    while (stem.size() > 1 && is_trailing_punct(stem.back())) {
      auto p = find(stem.substr(stem.size() - 1));
      if (!p) break;
      tail.push_back(*p);
      stem.remove_suffix(1);
      if (find(stem)) break;
    }
    if (auto id = find(stem)) {
      out.push_back(*id);
    } else if (unk) {
      out.push_back(*unk);
    } else {
      throw UnknownToken("unknown token: " + word);
    }
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (eot_ && id == *eot_) continue;
    const std::string& tok = token(id);
    if (!out.empty() && !is_attached_punct(tok)) out.push_back(' ');
    out.append(tok);
  }
  return out;
}

// ---- distributions -------------------------------------------------------

bool TokenDistribution::is_valid(double tol) const {
  if (probs.empty()) return false;
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

TokenDistribution softmax(std::span<const double> logits) {
  TokenDistribution d;
  if (logits.empty()) return d;
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double l : logits) max_logit = std::max(max_logit, l);
  if (!std::isfinite(max_logit)) {
    throw BackendUnavailable("all log-probabilities are -inf or invalid");
  }
  d.probs.resize(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    d.probs[i] = std::exp(logits[i] - max_logit);
    sum += d.probs[i];
  }
  for (double& p : d.probs) p /= sum;
  return d;
}

TokenDistribution LanguageModel::next_distribution(
    std::span<const TokenId> context) const {
  const Vocabulary& v = vocab();
  for (TokenId id : context) {
    if (!v.valid(id)) {
      throw UnknownToken("context token id out of range: " + std::to_string(id));
    }
  }
  return compute_distribution(context);
}

TokenDistribution UniformModel::compute_distribution(
    std::span<const TokenId>) const {
  const std::size_t n = vocab_.size();
  return TokenDistribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

// ---- TableModel ----------------------------------------------------------

TableModel::TableModel(Vocabulary vocab, Table table)
    : vocab_(std::move(vocab)), table_(std::move(table)) {
  if (vocab_.size() == 0) throw InvalidConfig("table LM has an empty vocabulary");
  for (const auto& [ctx, probs] : table_) {
    TokenDistribution d{probs};
    if (probs.size() != vocab_.size() || !d.is_valid()) {
      throw InvalidConfig("table LM entry is not a distribution over the vocabulary");
    }
    for (TokenId id : ctx) {
      if (!vocab_.valid(id)) throw UnknownToken("table context id out of range");
    }
    max_context_ = std::max(max_context_, ctx.size());
  }
}

TokenDistribution TableModel::compute_distribution(
    std::span<const TokenId> context) const {
  const std::size_t longest = std::min(max_context_, context.size());
  for (std::size_t k = longest + 1; k-- > 0;) {
    std::vector<TokenId> suffix(context.end() - static_cast<std::ptrdiff_t>(k),
                                context.end());
    auto it = table_.find(suffix);
    if (it != table_.end()) return TokenDistribution{it->second};
  }
  const std::size_t n = vocab_.size();
  return TokenDistribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

TableModel TableModel::from_json(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw InvalidConfig("table LM file is not a JSON object");
  }
  try {
    auto tokens = j.at("tokens").get<std::vector<std::string>>();
    auto sentence_end =
        j.value("sentence_end", std::vector<std::string>{"."});
    std::optional<std::string> eot;
    if (j.contains("end_of_text")) eot = j.at("end_of_text").get<std::string>();
    Vocabulary vocab(std::move(tokens), sentence_end, eot);
    Table table;
    for (const auto& entry : j.at("table")) {
      std::vector<TokenId> ctx;
      for (const auto& t : entry.at("context")) {
        ctx.push_back(vocab.id_of(t.get<std::string>()));
      }
      std::vector<double> probs(vocab.size(), 0.0);
      for (const auto& [tok, p] : entry.at("next").items()) {
        probs[static_cast<std::size_t>(vocab.id_of(tok))] = p.get<double>();
      }
      table[std::move(ctx)] = std::move(probs);
    }
    return TableModel(std::move(vocab), std::move(table));
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed table LM: ") + e.what());
  }
}

TableModel TableModel::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

// ---- NGramModel ----------------------------------------------------------

NGramModel::NGramModel(Vocabulary vocab, int order, double alpha, Counts counts)
    : vocab_(std::move(vocab)), order_(order), alpha_(alpha),
      counts_(std::move(counts)) {
  if (order_ < 1) throw InvalidConfig("n-gram order must be >= 1");
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) {
    throw InvalidConfig("smoothing alpha must be a non-negative real");
  }
  if (vocab_.size() == 0) throw InvalidConfig("n-gram model has an empty vocabulary");
  for (auto& [ctx, cc] : counts_) {
    if (ctx.size() >= static_cast<std::size_t>(order_)) {
      throw InvalidConfig("n-gram context longer than order - 1");
    }
    for (TokenId id : ctx) {
      if (!vocab_.valid(id)) throw UnknownToken("n-gram context id out of range");
    }
    std::uint64_t total = 0;
    for (const auto& [tok, c] : cc.next) {
      if (!vocab_.valid(tok)) throw UnknownToken("n-gram token id out of range");
      if (c == 0) throw InvalidConfig("stored n-gram counts must be >= 1");
      total += c;
    }
    cc.total = total;
  }
}

TokenDistribution NGramModel::compute_distribution(
    std::span<const TokenId> context) const {
  const std::size_t v = vocab_.size();
  const std::size_t longest =
      std::min(static_cast<std::size_t>(order_ - 1), context.size());
  std::vector<TokenId> key;
  key.reserve(longest);
  for (std::size_t k = longest + 1; k-- > 0;) {
    key.assign(context.end() - static_cast<std::ptrdiff_t>(k), context.end());
    auto it = counts_.find(key);
    if (it == counts_.end() || it->second.total == 0) continue;
    const ContextCounts& cc = it->second;
    const double denom =
        static_cast<double>(cc.total) + alpha_ * static_cast<double>(v);
    TokenDistribution d{std::vector<double>(v, alpha_ / denom)};
    for (const auto& [tok, c] : cc.next) {
      d.probs[static_cast<std::size_t>(tok)] =
          (static_cast<double>(c) + alpha_) / denom;
    }
    return d;
  }
  return TokenDistribution{std::vector<double>(v, 1.0 / static_cast<double>(v))};
}

NGramModel train_ngram(const std::vector<std::vector<TokenId>>& corpus, int n,
                       double alpha, Vocabulary vocab) {
  if (n < 1) throw InvalidConfig("n-gram order must be >= 1");
  const bool any_tokens = std::any_of(corpus.begin(), corpus.end(),
                                      [](const auto& s) { return !s.empty(); });
  if (!any_tokens) throw EmptyCorpus();
  NGramModel::Counts counts;
  std::vector<TokenId> ctx;
  for (const auto& seq : corpus) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (!vocab.valid(seq[i])) {
        throw UnknownToken("corpus token id out of range: " + std::to_string(seq[i]));
      }
      const std::size_t max_k = std::min(i, static_cast<std::size_t>(n - 1));
      for (std::size_t k = 0; k <= max_k; ++k) {
        ctx.assign(seq.begin() + static_cast<std::ptrdiff_t>(i - k),
                   seq.begin() + static_cast<std::ptrdiff_t>(i));
        ++counts[ctx].next[seq[i]];
      }
    }
  }
  return NGramModel(std::move(vocab), n, alpha, std::move(counts));
}

std::vector<std::string> pretokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& word : text::split_whitespace(text)) {
    std::string_view stem = word;
    std::vector<std::string> tail;
    while (stem.size() > 1 && is_trailing_punct(stem.back())) {
      tail.emplace_back(1, stem.back());
      stem.remove_suffix(1);
    }
    out.emplace_back(stem);
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

NGramModel train_ngram_from_text(std::span<const std::string> lines, int n, double alpha,
                                 std::optional<std::string> end_of_text) {
  std::vector<std::vector<std::string>> words;
  std::set<std::string> types;
  for (const auto& line : lines) {
    auto w = pretokenize(line);
    if (w.empty()) continue;
    types.insert(w.begin(), w.end());
    words.push_back(std::move(w));
  }
  if (end_of_text) types.insert(*end_of_text);
  Vocabulary vocab(std::vector<std::string>(types.begin(), types.end()), {"."}, end_of_text);
  std::vector<std::vector<TokenId>> corpus;
  corpus.reserve(words.size());
  for (const auto& w : words) {
    std::vector<TokenId> ids;
    ids.reserve(w.size() + 1);
    for (const auto& tok : w) ids.push_back(vocab.id_of(tok));
    if (end_of_text) ids.push_back(vocab.id_of(*end_of_text));
    corpus.push_back(std::move(ids));
  }
  return train_ngram(corpus, n, alpha, std::move(vocab));
}

// Little-endian encoding is done byte by byte so the format does not depend
// on host endianness.
namespace {

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string str(std::size_t n) {
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw InvalidConfig("truncated FNGM file");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string NGramModel::serialize() const {
  std::string out = "FNGM";
  put_le<std::uint16_t>(out, kNGramFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(order_));
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(alpha_));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab_.size()));
  for (const auto& tok : vocab_.tokens()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tok.size()));
    out.append(tok);
  }
  const auto& ends = vocab_.sentence_end_ids();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ends.size()));
  for (TokenId id : ends) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id));
  put_u8(out, vocab_.end_of_text() ? 1 : 0);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab_.end_of_text().value_or(0)));
  std::uint64_t entries = 0;
  for (const auto& [ctx, cc] : counts_) entries += cc.next.size();
  put_le<std::uint64_t>(out, entries);
  // std::map iteration is already sorted by (context, next).
  for (const auto& [ctx, cc] : counts_) {
    for (const auto& [tok, c] : cc.next) {
      put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ctx.size()));
      for (TokenId id : ctx) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id));
      put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tok));
      put_le<std::uint64_t>(out, c);
    }
  }
  return out;
}

NGramModel NGramModel::deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.str(4) != "FNGM") throw InvalidConfig("not an FNGM file (bad magic)");
  const auto version = r.le<std::uint16_t>();
  if (version != kNGramFormatVersion) {
    throw InvalidConfig("unsupported FNGM version " + std::to_string(version));
  }
  const auto order = static_cast<int>(r.le<std::uint32_t>());
  const double alpha = std::bit_cast<double>(r.le<std::uint64_t>());
  const auto vsize = r.le<std::uint32_t>();
  std::vector<std::string> tokens;
  tokens.reserve(vsize);
  for (std::uint32_t i = 0; i < vsize; ++i) {
    const auto len = r.le<std::uint32_t>();
    tokens.push_back(r.str(len));
  }
  const auto n_ends = r.le<std::uint32_t>();
  std::vector<TokenId> ends;
  for (std::uint32_t i = 0; i < n_ends; ++i) {
    ends.push_back(static_cast<TokenId>(r.le<std::uint32_t>()));
  }
  const bool has_eot = r.le<std::uint8_t>() != 0;
  const auto eot = r.le<std::uint32_t>();
  std::optional<std::string> eot_token;
  if (has_eot) {
    if (eot >= tokens.size()) throw InvalidConfig("FNGM eot id out of range");
    eot_token = tokens[eot];
  }
  Vocabulary vocab(std::move(tokens), {}, eot_token);
  vocab.set_sentence_end_ids(std::move(ends));
  Counts counts;
  const auto entries = r.le<std::uint64_t>();
  for (std::uint64_t e = 0; e < entries; ++e) {
    const auto ctx_len = r.le<std::uint32_t>();
    if (ctx_len >= static_cast<std::uint32_t>(std::max(order, 1))) {
      throw InvalidConfig("FNGM context longer than order - 1");
    }
    std::vector<TokenId> ctx(ctx_len);
    for (auto& id : ctx) id = static_cast<TokenId>(r.le<std::uint32_t>());
    const auto tok = static_cast<TokenId>(r.le<std::uint32_t>());
    const auto c = r.le<std::uint64_t>();
    counts[std::move(ctx)].next[tok] = c;
  }
  if (!r.at_end()) throw InvalidConfig("trailing bytes in FNGM file");
  return NGramModel(std::move(vocab), order, alpha, std::move(counts));
}

void NGramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::string bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

// ---- HttpModel -----------------------------------------------------------

HttpModel::HttpModel(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  const std::string body = post("/vocab", "{}");
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw BackendUnavailable("malformed /vocab response from " + base_url_);
  }
  try {
    auto tokens = j.at("tokens").get<std::vector<std::string>>();
    std::optional<std::string> eot;
    if (j.contains("eot_id")) {
      const auto id = j.at("eot_id").get<std::size_t>();
      if (id >= tokens.size()) throw BackendUnavailable("eot_id out of range");
      eot = tokens[id];
    } else {
      for (const char* cand : {"<|endoftext|>", "</s>", "<eot>"}) {
        if (std::find(tokens.begin(), tokens.end(), cand) != tokens.end()) {
          eot = cand;
          break;
        }
      }
    }
    vocab_ = Vocabulary(std::move(tokens), {}, eot);
    vocab_.set_sentence_end_ids(j.at("sentence_end_ids").get<std::vector<TokenId>>());
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("malformed /vocab response: ") + e.what());
  }
}

std::string HttpModel::post(const std::string& path, const std::string& body) const {
  httplib::Client client(base_url_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  auto res = client.Post(path, body, "application/json");
  if (!res) {
    throw BackendUnavailable("cannot reach " + base_url_ + path + ": " +
                             httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendUnavailable(base_url_ + path + " returned HTTP " +
                             std::to_string(res->status));
  }
  return res->body;
}

TokenDistribution HttpModel::compute_distribution(
    std::span<const TokenId> context) const {
  json req;
  req["context"] = std::vector<TokenId>(context.begin(), context.end());
  json j = json::parse(post("/next_token_dist", req.dump()), nullptr, false);
  if (j.is_discarded() || !j.contains("logprobs") || !j["logprobs"].is_array()) {
    throw BackendUnavailable("malformed /next_token_dist response");
  }
  std::vector<double> logprobs;
  logprobs.reserve(vocab_.size());
  for (const auto& v : j["logprobs"]) {
    if (v.is_number()) {
      logprobs.push_back(v.get<double>());
    } else {
      // JSON has no -inf; servers send null for impossible tokens.
      logprobs.push_back(-std::numeric_limits<double>::infinity());
    }
  }
  if (logprobs.size() != vocab_.size()) {
    throw BackendUnavailable("logprobs length does not match vocabulary size");
  }
  return softmax(logprobs);
}

// ---- factory and scoring -------------------------------------------------

std::unique_ptr<LanguageModel> make_backend(std::string_view spec) {
  if (spec.starts_with("http://") || spec.starts_with("https://")) {
    return std::make_unique<HttpModel>(std::string(spec));
  }
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidConfig("backend spec must be table:PATH, ngram:PATH or http:URL");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string rest(spec.substr(colon + 1));
  if (kind == "table") return std::make_unique<TableModel>(TableModel::load(rest));
  if (kind == "ngram") return std::make_unique<NGramModel>(NGramModel::load(rest));
  if (kind == "http") return std::make_unique<HttpModel>(rest);
  throw InvalidConfig("unknown backend kind: " + std::string(kind));
}

double sequence_perplexity(const LanguageModel& model,
                           std::span<const TokenId> tokens,
                           std::size_t scored_from) {
  if (scored_from >= tokens.size()) {
    throw InvalidConfig("perplexity needs at least one scored token");
  }
  double log_sum = 0.0;
  for (std::size_t i = scored_from; i < tokens.size(); ++i) {
    const TokenDistribution d = model.next_distribution(tokens.first(i));
    if (!model.vocab().valid(tokens[i])) {
      throw UnknownToken("token id out of range: " + std::to_string(tokens[i]));
    }
    const double p = d.probs[static_cast<std::size_t>(tokens[i])];
    if (p <= 0.0) throw ZeroProbabilityToken(i);
    log_sum += std::log(p);
  }
  const double n = static_cast<double>(tokens.size() - scored_from);
  return std::exp(-log_sum / n);
}

}  // namespace facdec
