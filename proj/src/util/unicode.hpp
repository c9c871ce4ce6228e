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

namespace dialogsynth::unicode {

// Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::string encode_utf8(char32_t cp);

std::string nfkc(std::string_view s);

bool is_whitespace(char32_t cp);
// Unicode general categories P* and S*.
bool is_punct_or_symbol(char32_t cp);
bool is_open_or_close_bracket(char32_t cp);
bool is_han(char32_t cp);
char32_t to_lower(char32_t cp);

std::vector<std::string> split_whitespace(std::string_view s);
std::string trim(std::string_view s);

}  // namespace dialogsynth::unicode
