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

#include "facdec/claim_filter.hpp"

#include <array>
#include <cctype>

#include "facdec/errors.hpp"

namespace facdec {
namespace {

constexpr std::array<std::string_view, 11> kFirstPerson = {
    "i", "we", "us", "i'm", "i've", "i'd", "i'll", "we're", "we've", "we'd", "we'll"};

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c >= 0x80;
}

// Words are maximal runs of letters, digits, apostrophes and non-ASCII bytes.
// The typographic apostrophe U+2019 is normalized to '\''.
template <typename Fn>
void for_each_word(std::string_view text, Fn&& fn) {
  std::string word;
  auto flush = [&] {
    if (!word.empty() && fn(word)) return true;
    word.clear();
    return false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == 0xE2 && i + 2 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      word.push_back('\'');
      i += 2;
    } else if (is_word_byte(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (flush()) {
      return;
    }
  }
  flush();
}

}  // namespace

std::string_view to_string(NotCheckworthyReason r) {
  switch (r) {
    case NotCheckworthyReason::kNoNamedEntity:
      return "NO_NAMED_ENTITY";
    case NotCheckworthyReason::kFirstPerson:
      return "FIRST_PERSON";
    case NotCheckworthyReason::kQuestionMark:
      return "QUESTION_MARK";
  }
  return "UNKNOWN";
}

bool contains_first_person(std::string_view text) {
  bool found = false;
  for_each_word(text, [&](const std::string& w) {
    // Leading/trailing quote apostrophes ('we') are not part of the word.
    std::string_view v = w;
    while (!v.empty() && v.front() == '\'') v.remove_prefix(1);
    while (!v.empty() && v.back() == '\'') v.remove_suffix(1);
    for (auto fp : kFirstPerson) {
      if (v == fp) {
        found = true;
        return true;
      }
    }
    return false;
  });
  return found;
}

CheckworthyVerdict is_checkworthy(std::string_view text,
                                  std::span<const EntitySpan> ne_spans) {
  for (const auto& s : ne_spans) {
    if (s.start > s.end || s.end > text.size()) {
      throw InvalidSpan("entity span [" + std::to_string(s.start) + ", " +
                        std::to_string(s.end) + ") outside text of length " +
                        std::to_string(text.size()));
    }
  }
  CheckworthyVerdict v;
  if (ne_spans.empty()) v.reasons.insert(NotCheckworthyReason::kNoNamedEntity);
  if (contains_first_person(text)) v.reasons.insert(NotCheckworthyReason::kFirstPerson);
  if (text.find('?') != std::string_view::npos) {
    v.reasons.insert(NotCheckworthyReason::kQuestionMark);
  }
  v.checkworthy = v.reasons.empty();
  return v;
}

}  // namespace facdec
