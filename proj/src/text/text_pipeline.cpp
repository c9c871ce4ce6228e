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

#include "text/text_pipeline.hpp"

#include "util/error.hpp"
#include "util/io.hpp"
#include "util/json_scan.hpp"
#include "util/unicode.hpp"

namespace dialogsynth::text {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(StageStatus s) {
  switch (s) {
    case StageStatus::kPending: return "pending";
    case StageStatus::kPassed: return "passed";
    case StageStatus::kRejected: return "rejected";
  }
  return "?";
}

namespace {

StageStatus parse_status(std::string_view s) {
  for (StageStatus v : {StageStatus::kPending, StageStatus::kPassed, StageStatus::kRejected}) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown stage status '" + std::string(s) + "'");
}

void reject(StageState& st, std::string reason) {
  st.status = StageStatus::kRejected;
  st.reason = std::move(reason);
}

void pass(StageState& st) {
  st.status = StageStatus::kPassed;
  st.reason.clear();
}

ordered_json stage_json(const StageState& s) {
  ordered_json j;
  j["status"] = to_string(s.status);
  if (!s.reason.empty()) j["reason"] = s.reason;
  return j;
}

StageState stage_from(const json& j) {
  StageState s;
  s.status = parse_status(j.at("status").get<std::string>());
  s.reason = j.value("reason", "");
  return s;
}

}  // namespace

std::optional<std::string> InstructionItem::rejection() const {
  if (rewrite.status == StageStatus::kRejected) return "rewrite:" + rewrite.reason;
  if (filter.status == StageStatus::kRejected) return "filter:" + filter.reason;
  if (postprocess.status == StageStatus::kRejected) return "postprocess:" + postprocess.reason;
  return std::nullopt;
}

ordered_json item_to_json(const InstructionItem& item) {
  ordered_json j;
  j["id"] = item.source_id;
  j["language"] = to_string(item.language);
  j["original"] = item.original;
  if (item.fragment) j["fragment"] = *item.fragment;
  if (item.rewritten) j["rewritten"] = *item.rewritten;
  if (item.spoken) {
    j["instruction"] = item.spoken->instruction;
    j["response"] = item.spoken->response;
  }
  j["stages"] = {{"rewrite", stage_json(item.rewrite)},
                 {"filter", stage_json(item.filter)},
                 {"postprocess", stage_json(item.postprocess)}};
  return j;
}

InstructionItem item_from_json(const json& j) {
  InstructionItem item;
  item.source_id = j.at("id").get<std::string>();
  item.language = parse_language(j.at("language").get<std::string>());
  item.original = j.at("original").get<std::string>();
  if (j.contains("fragment")) item.fragment = j["fragment"].get<std::string>();
  if (j.contains("rewritten")) item.rewritten = j["rewritten"].get<std::string>();
  if (j.contains("instruction")) {
    item.spoken = SpokenPair{j.at("instruction").get<std::string>(),
                             j.at("response").get<std::string>()};
  }
  const json& st = j.at("stages");
  item.rewrite = stage_from(st.at("rewrite"));
  item.filter = stage_from(st.at("filter"));
  item.postprocess = stage_from(st.at("postprocess"));
  return item;
}

bool is_valid_dialogue_id(std::string_view id) {
  if (id.empty() || id.size() > 200) return false;
  auto ok = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
  };
  for (char c : id) {
    if (!ok(c)) return false;
  }
  return id.front() != '.' && id.front() != '-' && id.front() != '_';
}

std::vector<InstructionItem> read_instructions(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingInputError(path.string());
  std::vector<InstructionItem> items;
  if (path.extension() == ".jsonl") {
    for (const json& row : read_jsonl(path)) {
      InstructionItem item;
      try {
        item.source_id = row.at("id").get<std::string>();
        item.original = row.at("text").get<std::string>();
        item.language = row.contains("language")
                            ? parse_language(row["language"].get<std::string>())
                            : detect_language(item.original);
      } catch (const json::exception& e) {
        throw PreconditionError(path.string() + ": bad instruction record: " + e.what());
      }
      items.push_back(std::move(item));
    }
  } else {
    const std::string stem = path.stem().string();
    std::size_t line_no = 0;
    const std::string content = read_file(path);
    std::size_t pos = 0;
    while (pos <= content.size()) {
      std::size_t nl = content.find('\n', pos);
      if (nl == std::string::npos) nl = content.size();
      ++line_no;
      std::string line = unicode::trim(std::string_view(content).substr(pos, nl - pos));
      if (!line.empty()) {
        InstructionItem item;
        item.source_id = stem + "_" + std::to_string(line_no);
        item.language = detect_language(line);
        item.original = std::move(line);
        items.push_back(std::move(item));
      }
      pos = nl + 1;
    }
  }
  std::map<std::string, int> seen;
  for (const auto& item : items) {
    if (!is_valid_dialogue_id(item.source_id)) {
      throw PreconditionError(path.string() + ": instruction id '" + item.source_id +
                              "' is not a valid dialogue id");
    }
    if (seen[item.source_id]++) {
      throw PreconditionError(path.string() + ": duplicate instruction id '" +
                              item.source_id + "'");
    }
  }
  return items;
}

std::string FilterVerdict::reason() const {
  if (parse_error) return "judge_parse_error";
  if (!suitable) return "unsuitable";
  if (!clear) return "unclear";
  if (!safe) return "unsafe";
  return {};
}

std::optional<bool> parse_judge_bool(std::string_view reply, std::string_view key) {
  const auto object = first_json_object(reply);
  if (!object) return std::nullopt;
  const json j = json::parse(*object, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return std::nullopt;
  auto it = j.find(std::string(key));
  if (it == j.end() || !it->is_boolean()) return std::nullopt;
  return it->get<bool>();
}

std::string clean_completion(std::string_view completion) {
  std::u32string s = unicode::decode_utf8(unicode::trim(completion));
  auto matching = [](char32_t open, char32_t close) {
    return (open == U'"' && close == U'"') || (open == U'\'' && close == U'\'') ||
           (open == U'“' && close == U'”') || (open == U'‘' && close == U'’') ||
           (open == U'「' && close == U'」');
  };
  while (s.size() >= 2 && matching(s.front(), s.back())) {
    s = unicode::decode_utf8(unicode::trim(unicode::encode_utf8(s.substr(1, s.size() - 2))));
  }
  return unicode::encode_utf8(s);
}

TextPipeline::TextPipeline(backends::ModelClients& clients, PromptSet prompts,
                           DirectiveRules rules, backends::ChatParams params)
    : clients_(clients),
      prompts_(std::move(prompts)),
      rules_(std::move(rules)),
      params_(params) {}

void TextPipeline::rewrite(InstructionItem& item) const {
  if (item.rewrite.status != StageStatus::kPending) return;
  if (unicode::trim(item.original).empty()) {
    reject(item.rewrite, "empty_instruction");
    return;
  }
  item.fragment = strip_directives(item.original, rules_);
  const std::string prompt =
      prompts_.get(TemplateName::kRewrite).fill({{"instruction", *item.fragment}});
  try {
    std::string rewritten = clean_completion(clients_.chat_complete(prompt, params_));
    if (rewritten.empty()) {
      reject(item.rewrite, "empty_rewrite");
      return;
    }
    item.rewritten = std::move(rewritten);
    pass(item.rewrite);
  } catch (const backends::BackendError&) {
    reject(item.rewrite, "backend_error");
  }
}

FilterVerdict TextPipeline::judge(std::string_view rewritten) const {
  if (rewritten.empty()) throw PreconditionError("rewritten instruction is empty");
  const std::map<std::string, std::string> values{{"instruction", std::string(rewritten)}};
  FilterVerdict v;
  auto ask = [&](TemplateName name, std::string_view key, bool& out) {
    const auto answer =
        parse_judge_bool(clients_.chat_complete(prompts_.get(name).fill(values), params_), key);
    if (!answer) {
      v.parse_error = true;
    } else {
      out = *answer;
    }
  };
  ask(TemplateName::kSuitability, "is_suitable_for_speech", v.suitable);
  ask(TemplateName::kClarity, "clear_enough", v.clear);
  ask(TemplateName::kSafety, "is_safe", v.safe);
  return v;
}

void TextPipeline::filter(InstructionItem& item) const {
  if (item.rewrite.status != StageStatus::kPassed ||
      item.filter.status != StageStatus::kPending) {
    return;
  }
  try {
    const FilterVerdict v = judge(*item.rewritten);
    if (v.passed()) {
      pass(item.filter);
    } else {
      reject(item.filter, v.reason());
    }
  } catch (const backends::BackendError&) {
    reject(item.filter, "backend_error");
  }
}

PostprocessResult TextPipeline::spoken_style(std::string_view rewritten,
                                             Language language) const {
  PostprocessResult r;
  const std::string reply = clients_.chat_complete(
      prompts_.get(TemplateName::kSpokenStyle).fill({{"Command", std::string(rewritten)}}),
      params_);
  const auto object = first_json_object(reply);
  const json j = object ? json::parse(*object, nullptr, false) : json();
  if (!j.is_object() || !j.contains("instruction") || !j.contains("response") ||
      !j["instruction"].is_string() || !j["response"].is_string()) {
    r.reason = "judge_parse_error";
    return r;
  }
  SpokenPair pair{unicode::trim(j["instruction"].get<std::string>()),
                  unicode::trim(j["response"].get<std::string>())};
  if (pair.instruction.empty() || pair.response.empty()) {
    r.reason = "style_violation:empty";
    return r;
  }
  r.violations = validate_spoken_text(pair.instruction, language, TextRole::kInstruction);
  for (auto& v : validate_spoken_text(pair.response, language, TextRole::kResponse)) {
    r.violations.push_back(std::move(v));
  }
  if (!r.violations.empty()) {
    r.reason = "style_violation:" + r.violations.front().code;
    return r;
  }
  r.pair = std::move(pair);
  return r;
}

void TextPipeline::postprocess(InstructionItem& item) const {
  if (item.filter.status != StageStatus::kPassed ||
      item.postprocess.status != StageStatus::kPending) {
    return;
  }
  try {
    PostprocessResult r = spoken_style(*item.rewritten, item.language);
    if (r.pair) {
      item.spoken = std::move(r.pair);
      pass(item.postprocess);
    } else {
      reject(item.postprocess, r.reason);
    }
  } catch (const backends::BackendError&) {
    reject(item.postprocess, "backend_error");
  }
}

void TextPipeline::run(InstructionItem& item) const {
  rewrite(item);
  filter(item);
  postprocess(item);
}

TextReport summarize(const std::vector<InstructionItem>& items) {
  TextReport r;
  r.total = items.size();
  for (const auto& stage : {"rewrite", "filter", "postprocess"}) r.stages[stage] = {0, 0};
  for (const auto& item : items) {
    const std::pair<const char*, const StageState*> stages[] = {
        {"rewrite", &item.rewrite}, {"filter", &item.filter}, {"postprocess", &item.postprocess}};
    for (const auto& [name, st] : stages) {
      if (st->status == StageStatus::kPassed) ++r.stages[name].first;
      if (st->status == StageStatus::kRejected) {
        ++r.stages[name].second;
        ++r.reasons[std::string(name) + ":" + st->reason];
      }
    }
    if (item.passed()) ++r.passed;
  }
  return r;
}

}  // namespace dialogsynth::text
