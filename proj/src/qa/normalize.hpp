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

#include <string>
#include <string_view>
#include <vector>

#include "corpus/types.hpp"

namespace dialogsynth::qa {

// NFKC; lowercase (English only); Unicode punctuation and symbols removed;
// ASCII digits spelled one by one ("7" -> "seven" / "七"). English splits
// on whitespace; Chinese yields one token per Han character and splits
// other runs on whitespace.
std::vector<std::string> normalize_text(std::string_view text, Language language);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace dialogsynth::qa
