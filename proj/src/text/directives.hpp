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

#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace dialogsynth::text {

// Sentences end at . ! ? and their fullwidth forms, or at a line break. The
// terminator stays with its sentence; surrounding whitespace is trimmed.
std::vector<std::string> split_sentences(std::string_view text);

class DirectiveRules {
 public:
  // Case-insensitive ECMAScript patterns, searched within each sentence.
  // Throws PreconditionError on an invalid pattern.
  explicit DirectiveRules(std::vector<std::string> patterns);
  static DirectiveRules defaults();

  bool matches(std::string_view sentence) const;
  const std::vector<std::string>& patterns() const { return patterns_; }

 private:
  std::vector<std::string> patterns_;
  std::vector<std::regex> compiled_;
};

// Drops directive sentences. If every sentence is a directive the longest
// one is returned instead, so the result is never empty.
std::string strip_directives(std::string_view original, const DirectiveRules& rules);

}  // namespace dialogsynth::text
