// Copyright 2026 The dialogsynth Authors
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

#include "qa/normalize.hpp"

#include <array>

#include "util/unicode.hpp"

namespace dialogsynth::qa {

namespace {

constexpr std::array<std::u32string_view, 10> kEnDigits = {
    U"zero", U"one", U"two", U"three", U"four", U"five", U"six", U"seven", U"eight", U"nine"};
constexpr std::u32string_view kZhDigits = U"零一二三四五六七八九";

}  // namespace

std::vector<std::string> normalize_text(std::string_view text, Language language) {
  const std::u32string cps = unicode::decode_utf8(unicode::nfkc(text));
  std::vector<std::string> tokens;
  std::u32string run;
  auto flush = [&] {
    if (!run.empty()) tokens.push_back(unicode::encode_utf8(run));
    run.clear();
  };
  for (char32_t cp : cps) {
    if (unicode::is_punct_or_symbol(cp)) continue;
    if (unicode::is_whitespace(cp)) {
      flush();
      continue;
    }
    if (cp >= U'0' && cp <= U'9') {
      flush();
      if (language == Language::kEn) {
        tokens.push_back(unicode::encode_utf8(kEnDigits[cp - U'0']));
      } else {
        tokens.push_back(unicode::encode_utf8(kZhDigits[cp - U'0']));
      }
      continue;
    }
    if (language == Language::kZh && unicode::is_han(cp)) {
      flush();
      tokens.push_back(unicode::encode_utf8(cp));
      continue;
    }
    run.push_back(language == Language::kEn ? unicode::to_lower(cp) : cp);
  }
  flush();
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace dialogsynth::qa
