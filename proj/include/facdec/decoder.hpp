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

/**
 * Greedy, nucleus (top-p) and factual-nucleus decoding.
 *
 * Factual-nucleus sampling shrinks the nucleus threshold geometrically while
 * a sentence is being generated and restores it when a new sentence starts:
 *
 *   p_t = max(omega, p * lambda^(t-1))
 *
 * where t is the 1-based index of the token within the current sentence.
 * t is 1 for the first generated token and for the token right after a
 * sentence-end token. Prompt tokens never advance t.
 *
 * decode() is a pure function of (backend, prompt, config, seed); the PRNG
 * lives on the stack of each call, so decodes may run concurrently.
 */

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "facdec/corpus.hpp"
#include "facdec/decode_config.hpp"
#include "facdec/lm.hpp"
#include "facdec/rng.hpp"

namespace facdec {

struct NucleusEntry {
  TokenId token;
  double prob;  // renormalized within the nucleus

  friend bool operator==(const NucleusEntry&, const NucleusEntry&) = default;
};

// Smallest prefix of the tokens sorted by (probability desc, id asc) whose
// cumulative probability reaches p, renormalized to sum to 1. The boundary
// token is included. Zero-probability tokens are never members.
std::vector<NucleusEntry> nucleus_set(const TokenDistribution& dist, double p);

double dynamic_p(double p, double lambda, double omega, int t);

bool is_sentence_end(TokenId token, const Vocabulary& vocab);

// Inverse-CDF draw over the renormalized nucleus.
TokenId sample_nucleus(std::span<const NucleusEntry> nucleus, Rng& rng);

// Per-generation stream seed derived from the run seed, the prompt id and
// the generation index, so streams do not depend on evaluation order.
std::uint64_t generation_seed(std::uint64_t config_seed,
                              std::string_view prompt_id,
                              std::uint32_t generation_index);

// Autoregressive decoding from prompt_tokens (must be non-empty). Stops after
// config.max_new_tokens tokens or when the vocabulary's end-of-text token is
// drawn; the end-of-text token itself is not emitted.
//
// Greedy steps record p_t = 0 in the trace.
Generation decode(const LanguageModel& model,
                  std::span<const TokenId> prompt_tokens,
                  const DecodeConfig& config, std::uint64_t seed);

}  // namespace facdec
