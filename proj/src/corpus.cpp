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

#include "facdec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "facdec/errors.hpp"
#include "facdec/text.hpp"
#include "json.hpp"

namespace facdec {
namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::vector<std::string> string_list(const json& j, const char* key,
                                     std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw MalformedRecord(line_no, std::string("'") + key + "' must be a list");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw MalformedRecord(line_no,
                            std::string("'") + key + "' entries must be strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string string_field(const json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw MalformedRecord(line_no, std::string("'") + key + "' must be a string");
  }
  return it->get<std::string>();
}

json parse_line(std::string_view line, std::size_t line_no) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedRecord(line_no, "not a JSON object");
  }
  return j;
}

}  // namespace

std::string_view to_string(PromptLabel l) {
  return l == PromptLabel::kFactual ? "FACTUAL" : "NONFACTUAL";
}

PromptLabel parse_prompt_label(std::string_view s) {
  // FEVER spellings are accepted as aliases.
  if (s == "FACTUAL" || s == "SUPPORTS" || s == "SUPPORTED") {
    return PromptLabel::kFactual;
  }
  if (s == "NONFACTUAL" || s == "REFUTES" || s == "REFUTED") {
    return PromptLabel::kNonfactual;
  }
  throw Error("unknown prompt label: " + std::string(s));
}

std::vector<Prompt> parse_prompts(std::istream& in, const std::string& source) {
  std::vector<Prompt> prompts;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_line(line, line_no);
    Prompt p;
    p.id = string_field(j, "id", line_no);
    p.text = string_field(j, "prompt", line_no);
    try {
      p.label = parse_prompt_label(string_field(j, "label", line_no));
    } catch (const MalformedRecord&) {
      throw;
    } catch (const Error& e) {
      throw MalformedRecord(line_no, e.what());
    }
    p.evidence_doc_ids = string_list(j, "evidence_docs", line_no);
    if (p.id.empty()) throw MalformedRecord(line_no, "empty id");
    if (text::trim(p.text).empty()) {
      throw MalformedRecord(line_no, "empty prompt text");
    }
    if (p.evidence_doc_ids.empty()) {
      throw MalformedRecord(line_no, "no evidence documents");
    }
    if (!seen.insert(p.id).second) throw DuplicateId(p.id);
    prompts.push_back(std::move(p));
  }
  if (prompts.empty()) throw EmptyFile(source);
  return prompts;
}

std::vector<Prompt> parse_prompts_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_prompts(in, path.string());
}

std::string serialize_prompt(const Prompt& p) {
  ordered_json j;
  j["id"] = p.id;
  j["prompt"] = p.text;
  j["label"] = to_string(p.label);
  j["evidence_docs"] = p.evidence_doc_ids;
  return j.dump();
}

void write_prompts(std::ostream& out, std::span<const Prompt> prompts) {
  for (const auto& p : prompts) out << serialize_prompt(p) << '\n';
}

PromptStatistics prompt_statistics(std::span<const Prompt> prompts) {
  PromptStatistics s;
  std::size_t factual_tokens = 0;
  std::size_t nonfactual_tokens = 0;
  for (const auto& p : prompts) {
    const std::size_t n = text::split_whitespace(p.text).size();
    if (p.label == PromptLabel::kFactual) {
      ++s.factual;
      factual_tokens += n;
    } else {
      ++s.nonfactual;
      nonfactual_tokens += n;
    }
  }
  if (s.factual) {
    s.factual_avg_tokens = static_cast<double>(factual_tokens) / s.factual;
  }
  if (s.nonfactual) {
    s.nonfactual_avg_tokens =
        static_cast<double>(nonfactual_tokens) / s.nonfactual;
  }
  return s;
}

KnowledgeDoc make_knowledge_doc(std::string doc_id, std::string title,
                                std::vector<std::string> sentences) {
  if (sentences.empty()) {
    throw MalformedDoc("document " + doc_id + " has no sentences");
  }
  KnowledgeDoc d;
  d.full_text = text::join(sentences, " ");
  d.doc_id = std::move(doc_id);
  d.title = std::move(title);
  d.sentences = std::move(sentences);
  return d;
}

KnowledgeStore::KnowledgeStore(std::vector<KnowledgeDoc> docs)
    : docs_(std::move(docs)) {
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (docs_[i].sentences.empty()) {
      throw MalformedDoc("document " + docs_[i].doc_id + " has no sentences");
    }
    if (!index_.emplace(docs_[i].doc_id, i).second) {
      throw DuplicateId(docs_[i].doc_id);
    }
  }
}

const KnowledgeDoc* KnowledgeStore::find(std::string_view doc_id) const {
  auto it = index_.find(std::string(doc_id));
  return it == index_.end() ? nullptr : &docs_[it->second];
}

const KnowledgeDoc& KnowledgeStore::at(std::string_view doc_id) const {
  const KnowledgeDoc* d = find(doc_id);
  if (!d) throw MissingDoc(std::string(doc_id));
  return *d;
}

namespace {

void parse_knowledge_into(std::istream& in, std::vector<KnowledgeDoc>& docs) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_line(line, line_no);
    auto id = string_field(j, "doc_id", line_no);
    auto title = string_field(j, "title", line_no);
    auto sentences = string_list(j, "sentences", line_no);
    docs.push_back(make_knowledge_doc(std::move(id), std::move(title),
                                      std::move(sentences)));
  }
}

}  // namespace

KnowledgeStore parse_knowledge(std::istream& in, const std::string& source) {
  std::vector<KnowledgeDoc> docs;
  parse_knowledge_into(in, docs);
  if (docs.empty()) throw EmptyFile(source);
  return KnowledgeStore(std::move(docs));
}

KnowledgeStore load_knowledge_store(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) {
    auto in = open_or_throw(path);
    return parse_knowledge(in, path.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<KnowledgeDoc> docs;
  for (const auto& f : files) {
    auto in = open_or_throw(f);
    parse_knowledge_into(in, docs);
  }
  if (docs.empty()) throw EmptyFile(path.string());
  return KnowledgeStore(std::move(docs));
}

std::string serialize_knowledge_doc(const KnowledgeDoc& doc) {
  ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["title"] = doc.title;
  j["sentences"] = doc.sentences;
  return j.dump();
}

// ---- generations ---------------------------------------------------------

std::string serialize_generation(const Generation& g) {
  ordered_json j;
  j["prompt_id"] = g.prompt_id;
  j["seed"] = g.seed;
  j["text"] = g.text;
  j["tokens"] = g.tokens;
  auto trace = ordered_json::array();
  for (const auto& s : g.trace) {
    trace.push_back(ordered_json::array({s.t_in_sentence, s.p_t, s.sentence_reset}));
  }
  j["trace"] = std::move(trace);
  return j.dump();
}

Generation parse_generation(std::string_view line, std::size_t line_no) {
  const json j = parse_line(line, line_no);
  Generation g;
  try {
    g.prompt_id = j.at("prompt_id").get<std::string>();
    g.seed = j.at("seed").get<std::uint64_t>();
    g.text = j.at("text").get<std::string>();
    g.tokens = j.at("tokens").get<std::vector<TokenId>>();
    for (const auto& step : j.at("trace")) {
      if (!step.is_array() || step.size() != 3) {
        throw MalformedRecord(line_no, "trace entries are [t, p_t, reset]");
      }
      g.trace.push_back(TraceStep{step[0].get<int>(), step[1].get<double>(),
                                  step[2].get<bool>()});
    }
  } catch (const json::exception& e) {
    throw MalformedRecord(line_no, e.what());
  }
  if (g.trace.size() > g.tokens.size()) {
    throw MalformedRecord(line_no, "trace longer than token list");
  }
  return g;
}

void write_generations(std::ostream& out, std::span<const Generation> gens) {
  for (const auto& g : gens) out << serialize_generation(g) << '\n';
}

std::vector<Generation> read_generations(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<Generation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    out.push_back(parse_generation(line, line_no));
  }
  if (out.empty()) throw EmptyFile(path.string());
  return out;
}

// ---- reports -------------------------------------------------------------

std::string serialize_report(const FactualityReport& r) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["label"] = r.label();
  ordered_json c;
  c["algorithm"] = to_string(r.config.algorithm);
  c["p"] = r.config.p;
  c["lambda"] = r.config.lambda;
  c["omega"] = r.config.omega;
  c["max_new_tokens"] = r.config.max_new_tokens;
  c["num_generations"] = r.config.num_generations_per_prompt;
  c["seed"] = r.config.seed;
  j["config"] = std::move(c);
  ordered_json m;
  m["ne_error"] = r.ne_error;
  m["entail_ratio"] = r.entail_ratio;
  m["diversity"] = r.diversity;
  m["repetition"] = r.repetition;
  m["mean_perplexity"] = r.mean_perplexity;
  j["metrics"] = std::move(m);
  ordered_json n;
  n["prompts"] = r.counts.prompts;
  n["generations"] = r.counts.generations;
  n["checkworthy"] = r.counts.checkworthy;
  n["all_ne"] = r.counts.all_ne;
  n["hallu_ne"] = r.counts.hallu_ne;
  n["entailed"] = r.counts.entailed;
  n["empty_evidence"] = r.counts.empty_evidence;
  n["repeated"] = r.counts.repeated;
  j["counts"] = std::move(n);
  return j.dump(2);
}

FactualityReport parse_report(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("report is not JSON");
  FactualityReport r;
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error("unsupported report schema version");
    }
    const auto& c = j.at("config");
    r.config.algorithm = parse_algorithm(c.at("algorithm").get<std::string>());
    r.config.p = c.at("p").get<double>();
    r.config.lambda = c.at("lambda").get<double>();
    r.config.omega = c.at("omega").get<double>();
    r.config.max_new_tokens = c.at("max_new_tokens").get<int>();
    r.config.num_generations_per_prompt = c.at("num_generations").get<int>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    const auto& m = j.at("metrics");
    r.ne_error = m.at("ne_error").get<double>();
    r.entail_ratio = m.at("entail_ratio").get<double>();
    r.diversity = m.at("diversity").get<double>();
    r.repetition = m.at("repetition").get<double>();
    r.mean_perplexity = m.at("mean_perplexity").get<double>();
    const auto& n = j.at("counts");
    r.counts.prompts = n.at("prompts").get<std::size_t>();
    r.counts.generations = n.at("generations").get<std::size_t>();
    r.counts.checkworthy = n.at("checkworthy").get<std::size_t>();
    r.counts.all_ne = n.at("all_ne").get<std::size_t>();
    r.counts.hallu_ne = n.at("hallu_ne").get<std::size_t>();
    r.counts.entailed = n.at("entailed").get<std::size_t>();
    r.counts.empty_evidence = n.value("empty_evidence", std::size_t{0});
    r.counts.repeated = n.value("repeated", std::size_t{0});
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return r;
}

FactualityReport read_report(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_report(ss.str());
}

}  // namespace facdec
