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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace facdec::text {

std::string trim(std::string_view s);

// Splits on ASCII whitespace; empty pieces are dropped.
std::vector<std::string> split_whitespace(std::string_view s);

// Lowercased runs of letters and digits. Input is decoded as UTF-8; any
// non-ASCII code point outside the general/CJK punctuation blocks counts as a
// letter. Case folding covers ASCII, Latin-1, Latin Extended-A, Greek and
// basic Cyrillic. Invalid bytes act as separators.
std::vector<std::string> word_tokens(std::string_view s);

// Sentence pieces split after '.', '!' or '?' when followed by whitespace or
// end of input. Pieces are trimmed; empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view s);

// Longest prefix of at most max_bytes that does not cut a UTF-8 sequence.
std::string utf8_truncate(std::string_view s, std::size_t max_bytes);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace facdec::text
