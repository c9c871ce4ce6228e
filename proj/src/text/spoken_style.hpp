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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "corpus/types.hpp"

namespace dialogsynth::text {

inline constexpr std::size_t kMaxResponseWords = 100;

enum class TextRole { kInstruction, kResponse };

struct StyleViolation {
  std::string code;    // "unpronounceable", "digit" or "length"
  std::string detail;
  bool operator==(const StyleViolation&) const = default;
};

// At most one violation per code, in the order unpronounceable, digit,
// length. The word cap applies to responses only.
std::vector<StyleViolation> validate_spoken_text(std::string_view text, Language language,
                                                 TextRole role = TextRole::kResponse);

// English: whitespace-delimited tokens. Chinese: one word per Han
// character, plus one per whitespace-delimited run of other letters.
std::size_t count_words(std::string_view text, Language language);

// Han characters present anywhere in the text.
bool contains_han(std::string_view text);
Language detect_language(std::string_view text);

}  // namespace dialogsynth::text
