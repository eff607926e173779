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

#include "facdec/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <variant>

#include "facdec/claim_filter.hpp"
#include "facdec/decoder.hpp"
#include "facdec/errors.hpp"
#include "facdec/rng.hpp"
#include "facdec/text.hpp"
#include "json.hpp"

namespace facdec {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_json(const DecodeConfig& c) {
  ordered_json j;
  j["algorithm"] = to_string(c.algorithm);
  j["p"] = c.p;
  j["lambda"] = c.lambda;
  j["omega"] = c.omega;
  j["max_new_tokens"] = c.max_new_tokens;
  j["num_generations"] = c.num_generations_per_prompt;
  j["seed"] = c.seed;
  return j;
}

DecodeConfig config_from_json(const nlohmann::json& j) {
  DecodeConfig c;
  c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  c.p = j.at("p").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.omega = j.at("omega").get<double>();
  c.max_new_tokens = j.at("max_new_tokens").get<int>();
  c.num_generations_per_prompt = j.at("num_generations").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

std::string directory_digest(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return file_digest(path);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0;
  for (const auto& f : files) h = hash_combine(h, fnv1a64(file_digest(f)));
  return hex64(h);
}

std::string absolute_path(const std::filesystem::path& p) {
  return std::filesystem::absolute(p).lexically_normal().string();
}

std::string absolute_backend(const std::string& spec) {
  for (const std::string kind : {"table:", "ngram:"}) {
    if (spec.starts_with(kind)) return kind + absolute_path(spec.substr(kind.size()));
  }
  return spec;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs job(i) for i in [0, n) on up to `workers` threads.
template <typename Job>
void parallel_for(std::size_t n, unsigned workers, Job&& job) {
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  }
}

struct PromptResult {
  std::vector<Generation> generations;
  std::optional<MetricAccumulator::PromptPart> part;
  std::string error;
};

ConfigRun fold(const DecodeConfig& config, std::vector<PromptResult>& results) {
  ConfigRun run;
  run.report.config = config;
  MetricAccumulator acc;
  for (auto& r : results) {
    if (!r.error.empty()) {
      run.errors.push_back(std::move(r.error));
      continue;
    }
    const std::string id = r.generations.empty() ? std::string() : r.generations.front().prompt_id;
    for (auto& g : r.generations) run.generations.push_back(std::move(g));
    if (r.part) acc.add(id, std::move(*r.part));
  }
  acc.finalize(run.report);
  return run;
}

std::string context_message(const DecodeConfig& config, const std::string& prompt_id,
                            const char* what) {
  return "(" + config.label() + ", " + prompt_id + "): " + what;
}

}  // namespace

// ---- providers -----------------------------------------------------------

ProviderSet::ProviderSet(const ProviderOptions& options) {
  if (options.ner_url) {
    ner_ = std::make_unique<HttpNer>(*options.ner_url);
  } else if (options.gazetteer) {
    ner_ = std::make_unique<Gazetteer>(Gazetteer::load(*options.gazetteer));
  } else {
    throw InvalidConfig("an NE provider is required (gazetteer file or NER endpoint)");
  }
  if (options.nli_url) {
    nli_ = std::make_unique<HttpNli>(*options.nli_url);
  } else {
    nli_ = std::make_unique<LexicalNli>();
  }
  if (options.embed_url) embedder_ = std::make_unique<HttpEmbedder>(*options.embed_url);
}

Providers ProviderSet::view() const { return {ner_.get(), nli_.get(), embedder_.get()}; }

// ---- scoring -------------------------------------------------------------

MetricAccumulator::PromptPart score_prompt(const Prompt& prompt,
                                           std::span<Generation> generations,
                                           const RunContext& ctx) {
  if (!ctx.store || !ctx.providers.ner || !ctx.providers.nli) {
    throw InvalidConfig("scoring needs a knowledge store, an NE provider and an NLI provider");
  }
  const auto docs = doc_ground_truth(prompt, *ctx.store);
  std::vector<DocumentTokens> doc_tokens;
  doc_tokens.reserve(docs.size());
  for (const KnowledgeDoc* d : docs) doc_tokens.emplace_back(d->full_text);

  MetricAccumulator::PromptPart part;
  TokenGroup group;
  for (Generation& g : generations) {
    ++part.generations;
    const auto continuation = g.continuation();
    group.push_back(continuation);
    if (repetition_flag(continuation, ctx.repetition)) ++part.repeated;
    if (ctx.model && !continuation.empty()) {
      part.perplexities.push_back(sequence_perplexity(*ctx.model, g.tokens, g.prompt_length()));
    }

    const auto spans = ctx.providers.ner->find(g.text);
    const bool checkworthy = is_checkworthy(g.text, spans).checkworthy;
    g.checkworthy = checkworthy;
    if (!checkworthy) continue;
    ++part.checkworthy;

    std::vector<NamedEntity> entities;
    entities.reserve(spans.size());
    for (const auto& s : spans) {
      entities.push_back(make_entity(g.text.substr(s.start, s.end - s.start), s.label));
    }
    const NeCounts ne = count_hallucinated(entities, doc_tokens);
    part.all_ne += ne.all;
    part.hallu_ne += ne.hallucinated;

    const EvidenceBundle evidence =
        build_evidence(g.text, prompt, *ctx.store, ctx.providers.embedder);
    if (evidence.sentence_level.empty()) {
      ++part.empty_evidence;
      continue;
    }
    EntailmentInput input;
    input.hypothesis = entailment_hypothesis(g.text, *ctx.providers.ner);
    for (const auto& e : evidence.sentence_level) input.premises.push_back(e.text);
    ++part.entail_evaluated;
    if (is_entailed(input, *ctx.providers.nli)) ++part.entailed;
  }
  part.ngrams = group_ngram_stats(group, 4);
  return part;
}

ConfigRun run_config(const RunContext& ctx, const DecodeConfig& config) {
  config.validate();
  if (!ctx.model) throw InvalidConfig("decoding needs a language model");
  std::vector<PromptResult> results(ctx.prompts.size());
  parallel_for(ctx.prompts.size(), ctx.workers, [&](std::size_t i) {
    const Prompt& prompt = ctx.prompts[i];
    PromptResult& r = results[i];
    try {
      const auto prompt_tokens = ctx.model->vocab().encode(prompt.text);
      for (int k = 0; k < config.num_generations_per_prompt; ++k) {
        const auto seed = generation_seed(config.seed, prompt.id, static_cast<std::uint32_t>(k));
        Generation g = decode(*ctx.model, prompt_tokens, config, seed);
        g.prompt_id = prompt.id;
        r.generations.push_back(std::move(g));
      }
      r.part = score_prompt(prompt, r.generations, ctx);
    } catch (const std::exception& e) {
      r.generations.clear();
      r.error = context_message(config, prompt.id, e.what());
    }
  });
  return fold(config, results);
}

ConfigRun evaluate_generations(const RunContext& ctx, const DecodeConfig& config,
                               std::vector<Generation> generations) {
  std::map<std::string, std::size_t> prompt_index;
  for (std::size_t i = 0; i < ctx.prompts.size(); ++i) prompt_index[ctx.prompts[i].id] = i;

  std::vector<std::vector<Generation>> grouped(ctx.prompts.size());
  std::vector<std::string> unknown;
  for (auto& g : generations) {
    auto it = prompt_index.find(g.prompt_id);
    if (it == prompt_index.end()) {
      unknown.push_back(context_message(config, g.prompt_id, "generation for unknown prompt"));
      continue;
    }
    grouped[it->second].push_back(std::move(g));
  }

  std::vector<PromptResult> results(ctx.prompts.size());
  parallel_for(ctx.prompts.size(), ctx.workers, [&](std::size_t i) {
    PromptResult& r = results[i];
    if (grouped[i].empty()) return;
    try {
      r.generations = std::move(grouped[i]);
      r.part = score_prompt(ctx.prompts[i], r.generations, ctx);
    } catch (const std::exception& e) {
      r.generations.clear();
      r.error = context_message(config, ctx.prompts[i].id, e.what());
    }
  });
  ConfigRun run = fold(config, results);
  run.errors.insert(run.errors.end(), unknown.begin(), unknown.end());
  return run;
}

// ---- sweep spec ----------------------------------------------------------

namespace {

using TomlValue = std::variant<std::string, std::int64_t, double, bool>;
using TomlTable = std::map<std::string, TomlValue>;

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

TomlValue parse_toml_value(std::string_view raw, std::size_t line_no) {
  const std::string v = text::trim(raw);
  auto fail = [&](const std::string& why) -> TomlValue {
    throw InvalidConfig("sweep spec line " + std::to_string(line_no) + ": " + why);
  };
  if (v.empty()) return fail("missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') return fail("unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        const char c = v[++i];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::string s(v);
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  try {
    std::size_t used = 0;
    if (s.find_first_of(".eE") == std::string::npos) {
      const long long i = std::stoll(s, &used);
      if (used == s.size()) return static_cast<std::int64_t>(i);
    } else {
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    }
  } catch (const std::exception&) {
  }
  return fail("unsupported value '" + std::string(v) + "'");
}

std::string as_string(const TomlValue& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw InvalidConfig("sweep spec: '" + key + "' must be a string");
}

double as_double(const TomlValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw InvalidConfig("sweep spec: '" + key + "' must be a number");
}

std::int64_t as_int(const TomlValue& v, const std::string& key) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw InvalidConfig("sweep spec: '" + key + "' must be an integer");
}

bool as_bool(const TomlValue& v, const std::string& key) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw InvalidConfig("sweep spec: '" + key + "' must be a boolean");
}

void apply_config_key(DecodeConfig& c, const std::string& key, const TomlValue& v) {
  if (key == "decode" || key == "algorithm") {
    c.algorithm = parse_algorithm(as_string(v, key));
  } else if (key == "p") {
    c.p = as_double(v, key);
  } else if (key == "lambda") {
    c.lambda = as_double(v, key);
  } else if (key == "omega") {
    c.omega = as_double(v, key);
  } else if (key == "max_new_tokens") {
    c.max_new_tokens = static_cast<int>(as_int(v, key));
  } else if (key == "num_gens" || key == "num_generations") {
    c.num_generations_per_prompt = static_cast<int>(as_int(v, key));
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(as_int(v, key));
  } else {
    throw InvalidConfig("sweep spec: unknown config key '" + key + "'");
  }
}

bool is_config_key(const std::string& key) {
  static const char* const kKeys[] = {"decode", "algorithm", "p", "lambda", "omega",
                                      "max_new_tokens", "num_gens", "num_generations", "seed"};
  return std::find(std::begin(kKeys), std::end(kKeys), key) != std::end(kKeys);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

SweepSpec parse_sweep_spec(std::istream& in, const std::filesystem::path& base_dir) {
  TomlTable top;
  std::vector<TomlTable> tables;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body(text::trim(strip_comment(line)));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body != "[[config]]") {
        throw InvalidConfig("sweep spec line " + std::to_string(line_no) +
                            ": only [[config]] tables are supported");
      }
      tables.emplace_back();
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("sweep spec line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(text::trim(std::string_view(body).substr(0, eq)));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    TomlTable& target = tables.empty() ? top : tables.back();
    if (target.count(key)) {
      throw InvalidConfig("sweep spec line " + std::to_string(line_no) + ": duplicate key '" +
                          key + "'");
    }
    target[key] = parse_toml_value(std::string_view(body).substr(eq + 1), line_no);
  }

  SweepSpec spec;
  DecodeConfig defaults;
  for (const auto& [key, v] : top) {
    if (is_config_key(key)) {
      apply_config_key(defaults, key, v);
    } else if (key == "prompts") {
      spec.prompts = resolve(base_dir, as_string(v, key));
    } else if (key == "knowledge") {
      spec.knowledge = resolve(base_dir, as_string(v, key));
    } else if (key == "backend") {
      std::string b = as_string(v, key);
      for (const char* kind : {"table:", "ngram:"}) {
        if (b.starts_with(kind)) {
          b = kind + resolve(base_dir, b.substr(std::string_view(kind).size())).string();
        }
      }
      spec.backend = b;
    } else if (key == "gazetteer") {
      spec.providers.gazetteer = resolve(base_dir, as_string(v, key));
    } else if (key == "ner") {
      spec.providers.ner_url = as_string(v, key);
    } else if (key == "nli") {
      spec.providers.nli_url = as_string(v, key);
    } else if (key == "embed") {
      spec.providers.embed_url = as_string(v, key);
    } else if (key == "out") {
      spec.out_dir = resolve(base_dir, as_string(v, key));
    } else if (key == "workers") {
      spec.workers = static_cast<unsigned>(as_int(v, key));
    } else if (key == "skip_missing") {
      spec.skip_missing = as_bool(v, key);
    } else if (key == "min_copies") {
      spec.repetition.min_copies = static_cast<int>(as_int(v, key));
    } else if (key == "max_period") {
      spec.repetition.max_period = static_cast<int>(as_int(v, key));
    } else {
      throw InvalidConfig("sweep spec: unknown key '" + key + "'");
    }
  }
  for (const auto& table : tables) {
    DecodeConfig c = defaults;
    for (const auto& [key, v] : table) apply_config_key(c, key, v);
    c.validate();
    spec.configs.push_back(c);
  }
  if (spec.configs.empty()) throw InvalidConfig("sweep spec has no [[config]] entries");
  if (spec.prompts.empty() || spec.knowledge.empty() || spec.backend.empty() ||
      spec.out_dir.empty()) {
    throw InvalidConfig("sweep spec needs prompts, knowledge, backend and out");
  }
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open sweep spec " + path.string());
  return parse_sweep_spec(in, path.parent_path().empty() ? "." : path.parent_path());
}

// ---- manifest ------------------------------------------------------------

std::string serialize_manifest(const SweepSpec& spec, const DecodeConfig& config,
                               const ConfigRun& run,
                               std::span<const std::string> skipped_prompts) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["complete"] = !run.partial();
  ordered_json inputs;
  inputs["prompts"] = absolute_path(spec.prompts);
  inputs["prompts_digest"] = file_digest(spec.prompts);
  inputs["knowledge"] = absolute_path(spec.knowledge);
  inputs["knowledge_digest"] = directory_digest(spec.knowledge);
  inputs["backend"] = absolute_backend(spec.backend);
  ordered_json providers;
  providers["gazetteer"] = spec.providers.gazetteer ? ordered_json(absolute_path(*spec.providers.gazetteer))
                                                    : ordered_json(nullptr);
  providers["ner"] = spec.providers.ner_url ? ordered_json(*spec.providers.ner_url) : ordered_json(nullptr);
  providers["nli"] = spec.providers.nli_url ? ordered_json(*spec.providers.nli_url) : ordered_json(nullptr);
  providers["embed"] = spec.providers.embed_url ? ordered_json(*spec.providers.embed_url) : ordered_json(nullptr);
  inputs["providers"] = std::move(providers);
  inputs["skip_missing"] = spec.skip_missing;
  inputs["min_copies"] = spec.repetition.min_copies;
  inputs["max_period"] = spec.repetition.max_period;
  j["inputs"] = std::move(inputs);
  j["label"] = config.label();
  j["config"] = config_json(config);
  j["generations"] = run.generations.size();
  j["skipped_prompts"] = std::vector<std::string>(skipped_prompts.begin(), skipped_prompts.end());
  j["errors"] = run.errors;
  return j.dump(2) + "\n";
}

SweepSpec load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open manifest " + path.string());
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidConfig("malformed manifest " + path.string());
  SweepSpec spec;
  try {
    const auto& inputs = j.at("inputs");
    spec.prompts = inputs.at("prompts").get<std::string>();
    spec.knowledge = inputs.at("knowledge").get<std::string>();
    spec.backend = inputs.at("backend").get<std::string>();
    const auto& p = inputs.at("providers");
    auto opt = [&](const char* key) -> std::optional<std::string> {
      if (!p.contains(key) || p[key].is_null()) return std::nullopt;
      return p[key].get<std::string>();
    };
    if (auto g = opt("gazetteer")) spec.providers.gazetteer = *g;
    spec.providers.ner_url = opt("ner");
    spec.providers.nli_url = opt("nli");
    spec.providers.embed_url = opt("embed");
    spec.skip_missing = inputs.value("skip_missing", false);
    spec.repetition.min_copies = inputs.value("min_copies", 3);
    spec.repetition.max_period = inputs.value("max_period", 20);
    spec.configs.push_back(config_from_json(j.at("config")));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("malformed manifest " + path.string() + ": " + e.what());
  }
  return spec;
}

// ---- benchmark -----------------------------------------------------------

std::vector<Prompt> filter_resolvable(std::span<const Prompt> prompts,
                                      const KnowledgeStore& store,
                                      std::vector<std::string>* skipped) {
  std::vector<Prompt> out;
  for (const auto& p : prompts) {
    const bool ok = std::all_of(p.evidence_doc_ids.begin(), p.evidence_doc_ids.end(),
                                [&](const std::string& id) { return store.contains(id); });
    if (ok) {
      out.push_back(p);
    } else if (skipped) {
      skipped->push_back(p.id);
    }
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

BenchmarkResult run_benchmark(const SweepSpec& spec) {
  if (spec.configs.empty()) throw InvalidConfig("no decode configs");
  for (const auto& c : spec.configs) c.validate();

  const auto prompts = parse_prompts_file(spec.prompts);
  const KnowledgeStore store = load_knowledge_store(spec.knowledge);
  std::vector<std::string> skipped;
  const auto usable = filter_resolvable(prompts, store, &skipped);
  if (!skipped.empty() && !spec.skip_missing) {
    const Prompt& first = *std::find_if(prompts.begin(), prompts.end(),
                                        [&](const Prompt& p) { return p.id == skipped.front(); });
    for (const auto& id : first.evidence_doc_ids) {
      if (!store.contains(id)) throw MissingDoc(id);
    }
  }
  const auto model = make_backend(spec.backend);
  const ProviderSet providers(spec.providers);

  RunContext ctx;
  ctx.model = model.get();
  ctx.prompts = usable;
  ctx.store = &store;
  ctx.providers = providers.view();
  ctx.workers = spec.workers;
  ctx.repetition = spec.repetition;

  BenchmarkResult result;
  const bool single = spec.configs.size() == 1;
  for (std::size_t i = 0; i < spec.configs.size(); ++i) {
    const DecodeConfig& config = spec.configs[i];
    ConfigRun run = run_config(ctx, config);
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02zu-", i);
    const auto dir = single ? spec.out_dir : spec.out_dir / (prefix + config.label());
    std::ostringstream gens;
    write_generations(gens, run.generations);
    write_text_file(dir / "generations.jsonl", gens.str());
    write_text_file(dir / "report.json", serialize_report(run.report));
    write_text_file(dir / "manifest.json", serialize_manifest(spec, config, run, skipped));
    result.partial = result.partial || run.partial();
    result.reports.push_back(run.report);
    result.run_dirs.push_back(dir);
  }
  if (result.reports.size() >= 2) {
    emit_tradeoff_curves(result.reports, spec.out_dir / "curves.csv");
  }
  return result;
}

// ---- curves --------------------------------------------------------------

std::string tradeoff_csv(std::span<const FactualityReport> reports) {
  if (reports.size() < 2) throw TooFewReports(reports.size());
  std::vector<const FactualityReport*> rows;
  for (const auto& r : reports) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    if (a->ne_error != b->ne_error) return a->ne_error < b->ne_error;
    return a->label() < b->label();
  });
  std::string out = "config,ne_error,entail_ratio,diversity,repetition,mean_perplexity\n";
  char buf[256];
  for (const auto* r : rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%.6f\n", r->ne_error, r->entail_ratio,
                  r->diversity, r->repetition, r->mean_perplexity);
    out += r->label();
    out += buf;
  }
  return out;
}

void emit_tradeoff_curves(std::span<const FactualityReport> reports,
                          const std::filesystem::path& csv_path) {
  write_text_file(csv_path, tradeoff_csv(reports));
}

std::vector<FactualityReport> collect_reports(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() == "report.json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<FactualityReport> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(read_report(p));
  return out;
}

}  // namespace facdec
