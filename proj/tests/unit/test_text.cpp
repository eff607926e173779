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

#include <string>
#include <vector>

#include "doctest.h"
#include "facdec/text.hpp"

using facdec::text::split_sentences;
using facdec::text::utf8_truncate;
using facdec::text::word_tokens;
using Strings = std::vector<std::string>;

TEST_CASE("trim and whitespace split") {
  CHECK(facdec::text::trim("  a b \t\n") == "a b");
  CHECK(facdec::text::trim("   ").empty());
  CHECK(facdec::text::split_whitespace(" a  b\tc\n") == Strings{"a", "b", "c"});
  CHECK(facdec::text::split_whitespace("").empty());
}

TEST_CASE("word tokens are lowercased alphanumeric runs") {
  CHECK(word_tokens("Barack Obama's birthplace, 1961!") ==
        Strings{"barack", "obama", "s", "birthplace", "1961"});
  CHECK(word_tokens("African-American") == Strings{"african", "american"});
  CHECK(word_tokens("...").empty());
}

TEST_CASE("word tokens fold case beyond ASCII") {
  CHECK(word_tokens("ÉCOLE Łódź") == Strings{"école", "łódź"});
  CHECK(word_tokens("ΑΘΗΝΑ") == Strings{"αθηνα"});
  CHECK(word_tokens("МОСКВА") == Strings{"москва"});
}

TEST_CASE("invalid UTF-8 bytes separate words") {
  const std::string s = std::string("ab") + '\xff' + "cd";
  CHECK(word_tokens(s) == Strings{"ab", "cd"});
}

TEST_CASE("sentence split needs whitespace or end after the mark") {
  CHECK(split_sentences("Obama was born in Hawaii. He was president! Really?") ==
        Strings{"Obama was born in Hawaii.", "He was president!", "Really?"});
  CHECK(split_sentences("Version 3.5 is out") == Strings{"Version 3.5 is out"});
  CHECK(split_sentences("  ").empty());
}

TEST_CASE("utf8_truncate never splits a code point") {
  CHECK(utf8_truncate("abcdef", 3) == "abc");
  CHECK(utf8_truncate("abc", 10) == "abc");
  // "é" is two bytes; cutting at 2 would split it.
  CHECK(utf8_truncate("aé", 2) == "a");
  CHECK(utf8_truncate("aé", 3) == "aé");
  CHECK(utf8_truncate("\xe2\x82\xac", 2).empty());
}

TEST_CASE("join") {
  CHECK(facdec::text::join({"a", "b", "c"}, " ") == "a b c");
  CHECK(facdec::text::join({}, ",").empty());
}
