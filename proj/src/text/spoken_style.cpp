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

#include "text/spoken_style.hpp"

#include "util/unicode.hpp"

namespace dialogsynth::text {

namespace {

bool is_markdown_mark(char32_t cp) {
  return cp == U'*' || cp == U'#' || cp == U'`' || cp == U'>' || cp == U'|';
}

std::string describe(char32_t cp) {
  if (cp == U'\n') return "line break";
  if (cp == U'\r') return "carriage return";
  return "'" + unicode::encode_utf8(cp) + "'";
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

std::vector<StyleViolation> validate_spoken_text(std::string_view text, Language language,
                                                 TextRole role) {
  std::vector<StyleViolation> out;
  const std::u32string cps = unicode::decode_utf8(text);

  for (char32_t cp : cps) {
    if (cp == U'_' || cp == U'\n' || cp == U'\r' || is_markdown_mark(cp) ||
        unicode::is_open_or_close_bracket(cp)) {
      out.push_back({"unpronounceable", describe(cp)});
      break;
    }
  }
  if (out.empty()) {
    const std::string lower = ascii_lower(text);
    for (std::string_view url : {"http", "www."}) {
      if (lower.find(url) != std::string::npos) {
        out.push_back({"unpronounceable", "url '" + std::string(url) + "'"});
        break;
      }
    }
  }
  for (char32_t cp : cps) {
    if (cp >= U'0' && cp <= U'9') {
      out.push_back({"digit", describe(cp)});
      break;
    }
  }
  if (role == TextRole::kResponse) {
    const std::size_t words = count_words(text, language);
    if (words > kMaxResponseWords) {
      out.push_back({"length", std::to_string(words) + " words"});
    }
  }
  return out;
}

std::size_t count_words(std::string_view text, Language language) {
  if (language == Language::kEn) return unicode::split_whitespace(text).size();
  std::size_t words = 0;
  bool in_run = false;
  for (char32_t cp : unicode::decode_utf8(text)) {
    if (unicode::is_han(cp)) {
      ++words;
      in_run = false;
    } else if (unicode::is_whitespace(cp) || unicode::is_punct_or_symbol(cp)) {
      in_run = false;
    } else if (!in_run) {
      ++words;
      in_run = true;
    }
  }
  return words;
}

bool contains_han(std::string_view text) {
  for (char32_t cp : unicode::decode_utf8(text)) {
    if (unicode::is_han(cp)) return true;
  }
  return false;
}

Language detect_language(std::string_view text) {
  return contains_han(text) ? Language::kZh : Language::kEn;
}

}  // namespace dialogsynth::text
