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

// Benchmark orchestration: generate, filter, retrieve, score, report.
//
// Prompts are processed by a pool of workers. Each worker produces one
// per-prompt partial result; results are folded in prompt order, so output
// files do not depend on the worker count.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facdec/corpus.hpp"
#include "facdec/lm.hpp"
#include "facdec/metrics.hpp"
#include "facdec/retrieval.hpp"

namespace facdec {

// Non-owning view of the scoring providers. ner and nli are required;
// embedder is optional (TF-IDF evidence only when null).
struct Providers {
  const NeProvider* ner = nullptr;
  const NliProvider* nli = nullptr;
  Embedder* embedder = nullptr;
};

// Owning provider set built from endpoint / file options.
struct ProviderOptions {
  std::optional<std::filesystem::path> gazetteer;
  std::optional<std::string> ner_url;
  std::optional<std::string> nli_url;
  std::optional<std::string> embed_url;
};

class ProviderSet {
 public:
  // Throws InvalidConfig when neither a gazetteer nor an NER endpoint is set.
  explicit ProviderSet(const ProviderOptions& options);
  Providers view() const;

 private:
  std::unique_ptr<NeProvider> ner_;
  std::unique_ptr<NliProvider> nli_;
  std::unique_ptr<Embedder> embedder_;
};

struct RunContext {
  const LanguageModel* model = nullptr;  // optional for scoring only
  std::span<const Prompt> prompts;
  const KnowledgeStore* store = nullptr;
  Providers providers;
  unsigned workers = 1;
  RepetitionParams repetition;
};

struct ConfigRun {
  FactualityReport report;
  std::vector<Generation> generations;  // prompt order, then generation index
  std::vector<std::string> errors;      // "(config, prompt_id): message"
  bool partial() const { return !errors.empty(); }
};

// Scores one prompt's generations; sets each generation's checkworthy flag.
MetricAccumulator::PromptPart score_prompt(const Prompt& prompt,
                                           std::span<Generation> generations,
                                           const RunContext& ctx);

// Decodes config.num_generations_per_prompt generations per prompt and
// scores them.
ConfigRun run_config(const RunContext& ctx, const DecodeConfig& config);

// Scores pre-existing generations grouped by prompt_id. Generations whose
// prompt is unknown are reported as errors.
ConfigRun evaluate_generations(const RunContext& ctx, const DecodeConfig& config,
                               std::vector<Generation> generations);

struct SweepSpec {
  std::vector<DecodeConfig> configs;
  std::filesystem::path prompts;
  std::filesystem::path knowledge;
  std::string backend;
  ProviderOptions providers;
  std::filesystem::path out_dir;
  unsigned workers = 0;  // 0: hardware concurrency
  bool skip_missing = false;
  RepetitionParams repetition;
};

// Minimal TOML subset: `key = value` pairs (strings, integers, floats,
// booleans) and `[[config]]` array tables. Top-level keys before the first
// table are spec fields and per-config defaults. Relative paths resolve
// against base_dir. Throws InvalidConfig.
SweepSpec parse_sweep_spec(std::istream& in, const std::filesystem::path& base_dir = ".");
SweepSpec load_sweep_spec(const std::filesystem::path& path);

// Manifest describing one run; enough to re-run it.
std::string serialize_manifest(const SweepSpec& spec, const DecodeConfig& config,
                               const ConfigRun& run,
                               std::span<const std::string> skipped_prompts);
// Reads the inputs of a manifest back into a single-config spec.
SweepSpec load_manifest(const std::filesystem::path& path);

struct BenchmarkResult {
  std::vector<FactualityReport> reports;
  std::vector<std::filesystem::path> run_dirs;
  bool partial = false;
};

// Runs every config. With one config, files go directly into out_dir;
// otherwise each config writes to out_dir/NN-<label>/ and out_dir/curves.csv
// is emitted. Throws MissingDoc unless skip_missing.
BenchmarkResult run_benchmark(const SweepSpec& spec);

// Prompts whose evidence documents are all present; the others' ids are
// appended to skipped.
std::vector<Prompt> filter_resolvable(std::span<const Prompt> prompts,
                                      const KnowledgeStore& store,
                                      std::vector<std::string>* skipped);

// CSV with header config,ne_error,entail_ratio,diversity,repetition,
// mean_perplexity; rows sorted by ne_error, ties by config label. Throws
// TooFewReports for fewer than two reports.
std::string tradeoff_csv(std::span<const FactualityReport> reports);
void emit_tradeoff_curves(std::span<const FactualityReport> reports,
                          const std::filesystem::path& csv_path);

// All report.json files below dir, in path order.
std::vector<FactualityReport> collect_reports(const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace facdec
