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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "backends/client.hpp"
#include "json.hpp"
#include "text/directives.hpp"
#include "text/prompts.hpp"
#include "text/spoken_style.hpp"

namespace dialogsynth::text {

enum class StageStatus { kPending, kPassed, kRejected };
std::string_view to_string(StageStatus s);

struct StageState {
  StageStatus status = StageStatus::kPending;
  std::string reason;  // set iff rejected
  bool operator==(const StageState&) const = default;
};

struct SpokenPair {
  std::string instruction;
  std::string response;
  bool operator==(const SpokenPair&) const = default;
};

// One seed instruction moving through rewrite -> filter -> postprocess.
struct InstructionItem {
  std::string source_id;
  std::string original;
  Language language = Language::kEn;
  std::optional<std::string> fragment;
  std::optional<std::string> rewritten;
  std::optional<SpokenPair> spoken;
  StageState rewrite;
  StageState filter;
  StageState postprocess;

  bool passed() const { return postprocess.status == StageStatus::kPassed; }
  // "<stage>:<reason>" for the stage that rejected the item, if any.
  std::optional<std::string> rejection() const;
};

nlohmann::ordered_json item_to_json(const InstructionItem& item);
InstructionItem item_from_json(const nlohmann::json& j);

// Dialogue ids become directory and file names, so they are restricted to
// [A-Za-z0-9._-] and must start with a letter or digit.
bool is_valid_dialogue_id(std::string_view id);

// .jsonl: records {"id", "text", optional "language"}. Anything else: one
// instruction per non-empty line, ids "<file stem>_<line number>".
// Language defaults to zh when the text holds Han characters.
std::vector<InstructionItem> read_instructions(const std::filesystem::path& path);

struct FilterVerdict {
  bool suitable = false;
  bool clear = false;
  bool safe = false;
  bool parse_error = false;
  bool passed() const { return !parse_error && suitable && clear && safe; }
  // Empty when passed.
  std::string reason() const;
};

struct PostprocessResult {
  std::optional<SpokenPair> pair;
  std::string reason;  // "judge_parse_error" or "style_violation:<code>"
  std::vector<StyleViolation> violations;
};

// Parses a judge reply of the form {"<key>": <bool>} wrapped in any prose.
std::optional<bool> parse_judge_bool(std::string_view reply, std::string_view key);

// Strips surrounding whitespace and one or more layers of matching quotes.
std::string clean_completion(std::string_view completion);

class TextPipeline {
 public:
  TextPipeline(backends::ModelClients& clients, PromptSet prompts, DirectiveRules rules,
               backends::ChatParams params = {});

  // Each stage is a no-op unless the previous stage passed. Backend
  // failures reject the item with reason "backend_error".
  void rewrite(InstructionItem& item) const;
  void filter(InstructionItem& item) const;
  void postprocess(InstructionItem& item) const;
  void run(InstructionItem& item) const;

  FilterVerdict judge(std::string_view rewritten) const;
  PostprocessResult spoken_style(std::string_view rewritten, Language language) const;

 private:
  backends::ModelClients& clients_;
  PromptSet prompts_;
  DirectiveRules rules_;
  backends::ChatParams params_;
};

struct TextReport {
  std::size_t total = 0;
  std::size_t passed = 0;
  // Per stage: {passed, rejected}; rejected counts keyed by reason.
  std::map<std::string, std::pair<std::size_t, std::size_t>> stages;
  std::map<std::string, std::size_t> reasons;
};

TextReport summarize(const std::vector<InstructionItem>& items);

}  // namespace dialogsynth::text
