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

#include "facdec/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "facdec/errors.hpp"

namespace facdec {
namespace {

// Slack on the cumulative-mass test so that a boundary token whose partial
// sum lands a few ulps under p still completes the nucleus.
constexpr double kMassEpsilon = 1e-12;

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

TokenId argmax(const TokenDistribution& dist) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.probs.size(); ++i) {
    if (dist.probs[i] > dist.probs[best]) best = i;
  }
  return static_cast<TokenId>(best);
}

}  // namespace

std::string_view to_string(DecodeAlgorithm a) {
  switch (a) {
    case DecodeAlgorithm::kGreedy:
      return "greedy";
    case DecodeAlgorithm::kTopP:
      return "topp";
    case DecodeAlgorithm::kFactualNucleus:
      return "factual";
  }
  return "unknown";
}

DecodeAlgorithm parse_algorithm(std::string_view s) {
  if (s == "greedy") return DecodeAlgorithm::kGreedy;
  if (s == "topp" || s == "top-p" || s == "top_p") return DecodeAlgorithm::kTopP;
  if (s == "factual" || s == "factual-nucleus" || s == "factual_nucleus") {
    return DecodeAlgorithm::kFactualNucleus;
  }
  throw InvalidConfig("unknown decoding algorithm: " + std::string(s));
}

void DecodeConfig::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidConfig("p must be in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InvalidConfig("lambda must be in (0, 1]");
  }
  if (!(omega >= 0.0 && omega <= p)) throw InvalidConfig("omega must be in [0, p]");
  if (max_new_tokens < 1) throw InvalidConfig("max_new_tokens must be >= 1");
  if (num_generations_per_prompt < 1) {
    throw InvalidConfig("num_generations_per_prompt must be >= 1");
  }
}

std::string DecodeConfig::label() const {
  switch (algorithm) {
    case DecodeAlgorithm::kGreedy:
      return "greedy";
    case DecodeAlgorithm::kTopP:
      return "topp-" + format_number(p);
    case DecodeAlgorithm::kFactualNucleus:
      return "factual-" + format_number(p) + "-" + format_number(lambda) + "-" +
             format_number(omega);
  }
  return "unknown";
}

std::vector<NucleusEntry> nucleus_set(const TokenDistribution& dist, double p) {
  const auto& probs = dist.probs;
  const std::size_t n = probs.size();
  std::vector<TokenId> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto before = [&](TokenId a, TokenId b) {
    const double pa = probs[static_cast<std::size_t>(a)];
    const double pb = probs[static_cast<std::size_t>(b)];
    return pa > pb || (pa == pb && a < b);
  };

  // Grow a sorted prefix until it holds the nucleus; typical nuclei are far
  // smaller than the vocabulary.
  std::size_t size = 0;
  std::size_t k = std::min<std::size_t>(n, 64);
  while (true) {
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                      order.end(), before);
    double cum = 0.0;
    bool done = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double pi = probs[static_cast<std::size_t>(order[i])];
      if (pi <= 0.0) {
        size = i;
        done = true;
        break;
      }
      cum += pi;
      if (cum >= p - kMassEpsilon) {
        size = i + 1;
        done = true;
        break;
      }
    }
    if (done) break;
    if (k == n) {
      size = n;
      break;
    }
    k = std::min(n, k * 4);
  }

  std::vector<NucleusEntry> out;
  out.reserve(size);
  double mass = 0.0;
  for (std::size_t i = 0; i < size; ++i) mass += probs[static_cast<std::size_t>(order[i])];
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back({order[i], probs[static_cast<std::size_t>(order[i])] / mass});
  }
  return out;
}

double dynamic_p(double p, double lambda, double omega, int t) {
  return std::max(omega, p * std::pow(lambda, static_cast<double>(t - 1)));
}

bool is_sentence_end(TokenId token, const Vocabulary& vocab) {
  return vocab.is_sentence_end(token);
}

TokenId sample_nucleus(std::span<const NucleusEntry> nucleus, Rng& rng) {
  if (nucleus.empty()) throw InvalidConfig("cannot sample from an empty nucleus");
  const double u = rng.uniform01();
  double cum = 0.0;
  for (const auto& e : nucleus) {
    cum += e.prob;
    if (u < cum) return e.token;
  }
  return nucleus.back().token;
}

std::uint64_t generation_seed(std::uint64_t config_seed,
                              std::string_view prompt_id,
                              std::uint32_t generation_index) {
  return hash_combine(hash_combine(config_seed, fnv1a64(prompt_id)),
                      generation_index);
}

Generation decode(const LanguageModel& model,
                  std::span<const TokenId> prompt_tokens,
                  const DecodeConfig& config, std::uint64_t seed) {
  config.validate();
  if (prompt_tokens.empty()) throw InvalidConfig("prompt must not be empty");
  const Vocabulary& vocab = model.vocab();
  const std::optional<TokenId> eot = vocab.end_of_text();

  Generation g;
  g.seed = seed;
  g.tokens.assign(prompt_tokens.begin(), prompt_tokens.end());
  g.tokens.reserve(prompt_tokens.size() + static_cast<std::size_t>(config.max_new_tokens));
  g.trace.reserve(static_cast<std::size_t>(config.max_new_tokens));

  Rng rng(seed);
  int t = 1;
  bool reset = false;
  for (int step = 0; step < config.max_new_tokens; ++step) {
    const TokenDistribution dist = model.next_distribution(g.tokens);
    TokenId next;
    double p_t = 0.0;
    switch (config.algorithm) {
      case DecodeAlgorithm::kGreedy:
        next = argmax(dist);
        break;
      case DecodeAlgorithm::kTopP:
        p_t = config.p;
        next = sample_nucleus(nucleus_set(dist, p_t), rng);
        break;
      case DecodeAlgorithm::kFactualNucleus:
      default:
        p_t = dynamic_p(config.p, config.lambda, config.omega, t);
        next = sample_nucleus(nucleus_set(dist, p_t), rng);
        break;
    }
    if (eot && next == *eot) break;
    g.tokens.push_back(next);
    g.trace.push_back({t, p_t, reset});
    if (is_sentence_end(next, vocab)) {
      t = 1;
      reset = true;
    } else {
      ++t;
      reset = false;
    }
  }
  g.text = vocab.decode(g.continuation());
  return g;
}

}  // namespace facdec
