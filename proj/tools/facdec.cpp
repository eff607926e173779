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

// facdec: factual-nucleus decoding and factuality benchmark CLI.
//
// Exit codes: 0 success, 2 partial results, 1 failure.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "facdec/bench.hpp"
#include "facdec/errors.hpp"
#include "facdec/training_prep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitPartial = 2;

struct DecodeFlags {
  std::string decode = "topp";
  double p = 0.9;
  double lambda = 1.0;
  double omega = 0.0;
  int max_new_tokens = 150;
  int num_gens = 10;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--decode", decode, "greedy | topp | factual")->capture_default_str();
    cmd->add_option("--p", p, "nucleus mass")->capture_default_str();
    cmd->add_option("--lambda", lambda, "per-token decay")->capture_default_str();
    cmd->add_option("--omega", omega, "lower bound on p_t")->capture_default_str();
    cmd->add_option("--max-new-tokens", max_new_tokens)->capture_default_str();
    cmd->add_option("--num-gens", num_gens, "generations per prompt")->capture_default_str();
    cmd->add_option("--seed", seed)->capture_default_str();
  }

  facdec::DecodeConfig config() const {
    facdec::DecodeConfig c;
    c.algorithm = facdec::parse_algorithm(decode);
    c.p = p;
    c.lambda = lambda;
    c.omega = omega;
    c.max_new_tokens = max_new_tokens;
    c.num_generations_per_prompt = num_gens;
    c.seed = seed;
    c.validate();
    return c;
  }
};

struct ProviderFlags {
  std::string gazetteer;
  std::string ner;
  std::string nli;
  std::string embed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--gazetteer", gazetteer, "entity list for the built-in NE matcher");
    cmd->add_option("--ner", ner, "NER endpoint base URL");
    cmd->add_option("--nli", nli, "NLI endpoint base URL (default: lexical stub)");
    cmd->add_option("--embed", embed, "embedding endpoint base URL");
  }

  facdec::ProviderOptions options() const {
    facdec::ProviderOptions o;
    if (!gazetteer.empty()) o.gazetteer = gazetteer;
    if (!ner.empty()) o.ner_url = ner;
    if (!nli.empty()) o.nli_url = nli;
    if (!embed.empty()) o.embed_url = embed;
    return o;
  }
};

int report_outcome(bool partial, const std::vector<std::string>& errors = {}) {
  for (const auto& e : errors) std::cerr << "error: " << e << '\n';
  if (partial) {
    std::cerr << "facdec: run incomplete; see manifest.json\n";
    return kExitPartial;
  }
  return kExitOk;
}

int print_reports(const facdec::BenchmarkResult& result) {
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& r = result.reports[i];
    std::printf("%-24s ne_error=%.4f entail=%.4f div=%.4f rep=%.4f ppl=%.3f -> %s\n",
                r.label().c_str(), r.ne_error, r.entail_ratio, r.diversity, r.repetition,
                r.mean_perplexity, result.run_dirs[i].string().c_str());
  }
  return report_outcome(result.partial);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facdec: factual-nucleus decoding and factuality evaluation"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "decode and score one configuration");
  std::string prompts, knowledge, backend, out, manifest;
  unsigned workers = 0;
  bool skip_missing = false;
  DecodeFlags decode_flags;
  ProviderFlags provider_flags;
  run->add_option("--manifest", manifest, "re-run the inputs recorded in a manifest.json");
  run->add_option("--prompts", prompts, "prompt JSONL");
  run->add_option("--knowledge", knowledge, "knowledge JSONL file or directory");
  run->add_option("--backend", backend, "table:PATH | ngram:PATH | http:URL");
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--workers", workers, "worker threads (0: all CPUs)");
  run->add_flag("--skip-missing", skip_missing, "exclude prompts whose evidence is missing");
  decode_flags.add_to(run);
  provider_flags.add_to(run);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run every configuration of a sweep spec");
  std::string spec_path, sweep_out;
  sweep->add_option("--spec", spec_path, "sweep spec (TOML subset)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "override the spec's output directory");
  sweep->add_option("--workers", workers, "worker threads (0: all CPUs)");

  // curves
  auto* curves = app.add_subcommand("curves", "emit trade-off CSV from report.json files");
  std::string reports_dir, csv_out;
  curves->add_option("--reports", reports_dir, "directory searched for report.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  curves->add_option("--out", csv_out, "CSV path (default: stdout)");

  // prep
  auto* prep = app.add_subcommand("prep", "write TopicPrefix + sentence-completion records");
  std::string store_path, strategy = "half", roots_path, prep_out;
  std::uint64_t prep_seed = 0;
  prep->add_option("--store", store_path, "knowledge JSONL file or directory")->required();
  prep->add_option("--strategy", strategy, "half | random | root")->capture_default_str();
  prep->add_option("--seed", prep_seed)->capture_default_str();
  prep->add_option("--roots", roots_path, "root annotations JSONL (strategy root)");
  prep->add_option("--out", prep_out, "output JSONL (default: stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "score pre-existing generations");
  std::string gens_path;
  DecodeFlags eval_decode;
  ProviderFlags eval_providers;
  std::string eval_prompts, eval_knowledge, eval_backend, eval_out;
  eval->add_option("--generations", gens_path, "generations JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--prompts", eval_prompts)->required();
  eval->add_option("--knowledge", eval_knowledge)->required();
  eval->add_option("--backend", eval_backend, "backend for perplexity (optional)");
  eval->add_option("--out", eval_out, "directory for report.json (default: stdout)");
  eval->add_option("--workers", workers);
  eval_decode.add_to(eval);
  eval_providers.add_to(eval);

  // train-ngram
  auto* train = app.add_subcommand("train-ngram", "train a smoothed n-gram model on text");
  std::string corpus_path, model_out, eot_token;
  int order = 3;
  double alpha = 0.01;
  train->add_option("--corpus", corpus_path, "text file, one sequence per line")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--order", order)->capture_default_str();
  train->add_option("--alpha", alpha, "additive smoothing")->capture_default_str();
  train->add_option("--eot", eot_token, "end-of-text token appended to each line");
  train->add_option("--out", model_out, "output model file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      facdec::SweepSpec spec;
      if (!manifest.empty()) {
        spec = facdec::load_manifest(manifest);
      } else {
        if (prompts.empty() || knowledge.empty() || backend.empty()) {
          throw facdec::InvalidConfig("run needs --prompts, --knowledge and --backend (or --manifest)");
        }
        spec.prompts = prompts;
        spec.knowledge = knowledge;
        spec.backend = backend;
        spec.providers = provider_flags.options();
        spec.skip_missing = skip_missing;
        spec.configs.push_back(decode_flags.config());
      }
      spec.out_dir = out;
      spec.workers = workers;
      return print_reports(facdec::run_benchmark(spec));
    }

    if (*sweep) {
      facdec::SweepSpec spec = facdec::load_sweep_spec(spec_path);
      if (!sweep_out.empty()) spec.out_dir = sweep_out;
      if (workers) spec.workers = workers;
      return print_reports(facdec::run_benchmark(spec));
    }

    if (*curves) {
      const auto reports = facdec::collect_reports(reports_dir);
      const std::string csv = facdec::tradeoff_csv(reports);
      if (csv_out.empty()) {
        std::cout << csv;
      } else {
        facdec::write_text_file(csv_out, csv);
      }
      return kExitOk;
    }

    if (*prep) {
      const auto store = facdec::load_knowledge_store(store_path);
      facdec::PrepareOptions options;
      options.strategy = facdec::parse_pivot_strategy(strategy);
      options.seed = prep_seed;
      facdec::RootAnnotations roots;
      if (!roots_path.empty()) {
        roots = facdec::load_root_annotations(roots_path);
        options.roots = &roots;
      }
      const auto result = facdec::prepare_corpus(store, options);
      for (const auto& [doc_id, idx] : result.no_loss) {
        std::cerr << "warning: " << doc_id << " sentence " << idx
                  << " is fully masked and contributes no loss\n";
      }
      std::ostringstream ss;
      facdec::write_records(ss, result.records);
      if (prep_out.empty()) {
        std::cout << ss.str();
      } else {
        facdec::write_text_file(prep_out, ss.str());
      }
      return kExitOk;
    }

    if (*train) {
      std::ifstream in(corpus_path);
      std::vector<std::string> lines;
      for (std::string line; std::getline(in, line);) lines.push_back(line);
      std::optional<std::string> eot;
      if (!eot_token.empty()) eot = eot_token;
      const auto model = facdec::train_ngram_from_text(lines, order, alpha, eot);
      model.save(model_out);
      std::cout << "vocabulary " << model.vocab().size() << ", order " << order << " -> "
                << model_out << '\n';
      return kExitOk;
    }

    if (*eval) {
      const auto prompt_list = facdec::parse_prompts_file(eval_prompts);
      const auto store = facdec::load_knowledge_store(eval_knowledge);
      std::unique_ptr<facdec::LanguageModel> model;
      if (!eval_backend.empty()) model = facdec::make_backend(eval_backend);
      const facdec::ProviderSet providers(eval_providers.options());
      facdec::RunContext ctx;
      ctx.model = model.get();
      ctx.prompts = prompt_list;
      ctx.store = &store;
      ctx.providers = providers.view();
      ctx.workers = workers;
      const auto config = eval_decode.config();
      auto run_result =
          facdec::evaluate_generations(ctx, config, facdec::read_generations(gens_path));
      const std::string report = facdec::serialize_report(run_result.report);
      if (eval_out.empty()) {
        std::cout << report;
      } else {
        facdec::write_text_file(std::filesystem::path(eval_out) / "report.json", report);
      }
      return report_outcome(run_result.partial(), run_result.errors);
    }
  } catch (const std::exception& e) {
    std::cerr << "facdec: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
