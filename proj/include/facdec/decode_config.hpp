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

#include <cstdint>
#include <string>
#include <string_view>

namespace facdec {

enum class DecodeAlgorithm { kGreedy, kTopP, kFactualNucleus };

std::string_view to_string(DecodeAlgorithm a);
// Accepts "greedy", "topp" and "factual" (the CLI spellings).
DecodeAlgorithm parse_algorithm(std::string_view s);

struct DecodeConfig {
  DecodeAlgorithm algorithm = DecodeAlgorithm::kTopP;
  double p = 0.9;
  double lambda = 1.0;
  double omega = 0.0;
  int max_new_tokens = 150;
  int num_generations_per_prompt = 10;
  std::uint64_t seed = 0;

  // Throws InvalidConfig unless p in (0,1], lambda in (0,1], omega in [0,p]
  // and both counts are positive.
  void validate() const;

  // Stable human-readable identifier, also used as a directory name:
  // "greedy", "topp-0.9", "factual-0.9-0.9-0.3".
  std::string label() const;

  friend bool operator==(const DecodeConfig&, const DecodeConfig&) = default;
};

}  // namespace facdec
