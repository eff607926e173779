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

// Check-worthiness filter applied to whole continuations before factuality
// scoring. A continuation is dropped if it has no named entity, uses a
// first-person pronoun (I, we, us and their contractions, matched as whole
// words, case-insensitively) or contains a question mark anywhere.

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace facdec {

// Byte offsets [start, end) into the text the span was detected in.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

enum class NotCheckworthyReason { kNoNamedEntity, kFirstPerson, kQuestionMark };

std::string_view to_string(NotCheckworthyReason r);

struct CheckworthyVerdict {
  bool checkworthy = true;
  std::set<NotCheckworthyReason> reasons;
};

bool contains_first_person(std::string_view text);

// Throws InvalidSpan when a span is inverted or runs past the text.
CheckworthyVerdict is_checkworthy(std::string_view text,
                                  std::span<const EntitySpan> ne_spans);

}  // namespace facdec
