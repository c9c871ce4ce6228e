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

#include "util/json_scan.hpp"

#include "util/error.hpp"

namespace dialogsynth {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Finds the end (exclusive) of the object starting at `start`.
std::optional<std::size_t> object_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
        if (depth == 0) return i + 1;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '{':
      case '[':
        ++depth;
        break;
      case '}':
      case ']':
        if (--depth == 0) return i + 1;
        break;
      default:
        break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string_view> first_json_object(std::string_view text) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    if (auto end = object_end(text, start)) {
      return text.substr(start, *end - start);
    }
  }
  return std::nullopt;
}

JsonArrayReader::JsonArrayReader(std::istream& in) : in_(in) {
  if (peek_non_ws() != '[') {
    throw ParseError("expected '[' opening the metadata list", pos_);
  }
  get();
}

int JsonArrayReader::get() {
  const int c = in_.get();
  if (c != std::char_traits<char>::eof()) ++pos_;
  return c;
}

int JsonArrayReader::peek_non_ws() {
  for (;;) {
    const int c = in_.peek();
    if (c == std::char_traits<char>::eof()) return c;
    if (!is_ws(static_cast<char>(c))) return c;
    get();
  }
}

std::optional<JsonArrayReader::Element> JsonArrayReader::next() {
  constexpr int kEof = std::char_traits<char>::eof();
  if (done_) return std::nullopt;
  int c = peek_non_ws();
  if (c == kEof) throw ParseError("unterminated list", pos_);
  if (c == ']') {
    get();
    done_ = true;
    if (peek_non_ws() != kEof) {
      throw ParseError("trailing bytes after list", pos_);
    }
    return std::nullopt;
  }
  if (!first_) {
    if (c != ',') throw ParseError("expected ','", pos_);
    get();
    c = peek_non_ws();
  }
  first_ = false;

  Element element{{}, pos_};
  if (c != '{' && c != '[' && c != '"') {
    while ((c = in_.peek()) != kEof && c != ',' && c != ']' &&
           !is_ws(static_cast<char>(c))) {
      element.bytes.push_back(static_cast<char>(get()));
    }
    if (element.bytes.empty()) throw ParseError("empty element", pos_);
    return element;
  }
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  while ((c = get()) != kEof) {
    const char ch = static_cast<char>(c);
    element.bytes.push_back(ch);
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (ch == '\\') {
        escaped = true;
      } else if (ch == '"') {
        in_string = false;
        if (depth == 0) return element;
      }
      continue;
    }
    if (ch == '"') {
      in_string = true;
    } else if (ch == '{' || ch == '[') {
      ++depth;
    } else if (ch == '}' || ch == ']') {
      if (--depth == 0) return element;
    }
  }
  throw ParseError("unterminated element", element.offset);
}

}  // namespace dialogsynth
