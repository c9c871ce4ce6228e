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

#include "text/directives.hpp"

#include "util/error.hpp"
#include "util/unicode.hpp"

namespace dialogsynth::text {

namespace {

bool is_terminator(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'。' || cp == U'！' ||
         cp == U'？';
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::u32string current;
  auto flush = [&] {
    std::string s = unicode::trim(unicode::encode_utf8(current));
    if (!s.empty()) out.push_back(std::move(s));
    current.clear();
  };
  const std::u32string cps = unicode::decode_utf8(text);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (cp == U'\n') {
      flush();
      continue;
    }
    current.push_back(cp);
    // "3.5" and "e.g." style runs stay inside one sentence.
    if (is_terminator(cp) &&
        (i + 1 == cps.size() || unicode::is_whitespace(cps[i + 1]) || cp > 0x7F)) {
      while (i + 1 < cps.size() && is_terminator(cps[i + 1])) current.push_back(cps[++i]);
      flush();
    }
  }
  flush();
  return out;
}

DirectiveRules::DirectiveRules(std::vector<std::string> patterns)
    : patterns_(std::move(patterns)) {
  for (const auto& p : patterns_) {
    try {
      compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw PreconditionError("bad directive pattern '" + p + "': " + e.what());
    }
  }
}

DirectiveRules DirectiveRules::defaults() {
  return DirectiveRules({
      R"(^(please\s+)?(classify|categori[sz]e|rewrite|paraphrase|rephrase|summari[sz]e|translate|edit|correct|identify|extract|label|answer|complete|read)\b.*\b(following|below|above|given)\b)",
      R"(^(given|using|based on)\s+(the|this)\s+(following|text|passage|input|sentence|paragraph|article)\b)",
      R"(^(input|output|text|sentence|passage|paragraph)\s*:)",
      R"(^(请\s*(根据|阅读|参考)?|根据|阅读|参考)\s*(以下|下面|下列|给定|所给))",
      R"(^(以下|下面|下列)(是|为|的))",
  });
}

bool DirectiveRules::matches(std::string_view sentence) const {
  const std::string s(sentence);
  for (const auto& re : compiled_) {
    if (std::regex_search(s, re)) return true;
  }
  return false;
}

std::string strip_directives(std::string_view original, const DirectiveRules& rules) {
  if (unicode::trim(original).empty()) throw PreconditionError("instruction text is empty");
  const auto sentences = split_sentences(original);
  std::string kept;
  bool removed = false;
  for (const auto& s : sentences) {
    if (rules.matches(s)) {
      removed = true;
      continue;
    }
    if (!kept.empty()) kept += ' ';
    kept += s;
  }
  if (!removed) return std::string(original);
  if (!kept.empty()) return kept;
  const std::string* longest = &sentences.front();
  for (const auto& s : sentences) {
    if (unicode::decode_utf8(s).size() > unicode::decode_utf8(*longest).size()) longest = &s;
  }
  return *longest;
}

}  // namespace dialogsynth::text
