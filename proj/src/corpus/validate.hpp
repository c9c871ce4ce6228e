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

namespace dialogsynth::corpus {

// Turn boundaries and total duration are compared with 1 ms slack.
inline constexpr double kTimeTolerance = 1e-3;

struct Violation {
  std::string code;   // e.g. "overlap", "unknown_speaker"
  std::string field;  // e.g. "dialog[1].start"
  std::string message;
};

struct ValidationReport {
  std::string dialogue_id;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
};

// Violations are data: never throws.
ValidationReport validate_record(const DialogueRecord& record);

}  // namespace dialogsynth::corpus
