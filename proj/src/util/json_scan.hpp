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
#include <istream>
#include <optional>
#include <string>
#include <string_view>

namespace dialogsynth {

// Returns the first balanced `{...}` span in `text`, honouring JSON string
// quoting, or nullopt if no object closes.
std::optional<std::string_view> first_json_object(std::string_view text);

// Incremental reader over the elements of a top-level JSON array held in a
// stream. Each call to next() yields the raw bytes of one element and its
// starting byte offset, so arbitrarily long lists never sit in memory whole.
class JsonArrayReader {
 public:
  struct Element {
    std::string bytes;
    std::size_t offset;
  };

  // Throws ParseError if the stream does not open with '['.
  explicit JsonArrayReader(std::istream& in);

  // nullopt once the closing ']' is consumed. Throws ParseError on
  // structural damage (unterminated element, missing comma, trailing bytes).
  std::optional<Element> next();

 private:
  int peek_non_ws();
  int get();

  std::istream& in_;
  std::size_t pos_ = 0;
  bool first_ = true;
  bool done_ = false;
};

}  // namespace dialogsynth
