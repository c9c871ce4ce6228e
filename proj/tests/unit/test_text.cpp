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

#include <fstream>

#include "backends/client.hpp"
#include "backends/mock.hpp"
#include "doctest.h"
#include "support.hpp"
#include "text/text_pipeline.hpp"
#include "util/io.hpp"

using namespace dialogsynth;
using namespace dialogsynth::text;
using Sv = StyleViolation;

namespace {

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += i ? " word" : "word";
  return s;
}

std::filesystem::path prompt_dir() { return std::filesystem::path(DS_SOURCE_DIR) / "data/prompts"; }

std::string fill1(TemplateName n, const std::string& key, const std::string& value) {
  return PromptSet::builtin().get(n).fill({{key, value}});
}

// Scripted replies for one rewritten instruction passing all three judges.
void script_judges(backends::MockConfig& cfg, const std::string& rewritten, bool suitable,
                   bool clear, bool safe) {
  auto b = [](bool v) { return v ? std::string("true") : std::string("false"); };
  cfg.chat_script[fill1(TemplateName::kSuitability, "instruction", rewritten)] =
      "{\"is_suitable_for_speech\": " + b(suitable) + "}";
  cfg.chat_script[fill1(TemplateName::kClarity, "instruction", rewritten)] =
      "Verdict: {\"clear_enough\": " + b(clear) + "}";
  cfg.chat_script[fill1(TemplateName::kSafety, "instruction", rewritten)] =
      "{\"is_safe\": " + b(safe) + "}";
}

struct ThrowingChat : backends::ChatBackend {
  std::string complete(std::string_view, const backends::ChatParams&) override {
    throw backends::BackendError(backends::BackendError::Kind::kFailure, "model refused");
  }
};

backends::RetryPolicy no_sleep() {
  backends::RetryPolicy p;
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

InstructionItem item(std::string id, std::string text, Language lang = Language::kEn) {
  InstructionItem it;
  it.source_id = std::move(id);
  it.original = std::move(text);
  it.language = lang;
  return it;
}

}  // namespace

TEST_CASE("style validator flags digits, symbols and length") {
  CHECK(validate_spoken_text("The answer is 1796.", Language::kEn) ==
        std::vector<Sv>{{"digit", "'1'"}});
  CHECK(validate_spoken_text("The answer is seventeen ninety-six.", Language::kEn).empty());
  CHECK(validate_spoken_text("Call it snake_case.", Language::kEn) ==
        std::vector<Sv>{{"unpronounceable", "'_'"}});
  CHECK(validate_spoken_text("First line\nsecond line", Language::kEn) ==
        std::vector<Sv>{{"unpronounceable", "line break"}});
  CHECK(validate_spoken_text("Visit www.example.org today", Language::kEn) ==
        std::vector<Sv>{{"unpronounceable", "url 'www.'"}});
  CHECK(validate_spoken_text("Say (quietly) hello", Language::kEn) ==
        std::vector<Sv>{{"unpronounceable", "'('"}});
  CHECK(validate_spoken_text("答案是【三】", Language::kZh) ==
        std::vector<Sv>{{"unpronounceable", "'【'"}});
  // Order is fixed: unpronounceable, digit, length.
  const auto all = validate_spoken_text("**Top 3** " + words(100), Language::kEn);
  REQUIRE(all.size() == 3);
  CHECK(all[0].code == "unpronounceable");
  CHECK(all[1].code == "digit");
  CHECK(all[2] == Sv{"length", "102 words"});
}

TEST_CASE("the response word cap is one hundred") {
  CHECK(validate_spoken_text(words(100), Language::kEn).empty());
  CHECK(validate_spoken_text(words(101), Language::kEn) ==
        std::vector<Sv>{{"length", "101 words"}});
  CHECK(validate_spoken_text(words(101), Language::kEn, TextRole::kInstruction).empty());
  std::string han;
  for (int i = 0; i < 101; ++i) han += "好";
  CHECK(validate_spoken_text(han, Language::kZh) == std::vector<Sv>{{"length", "101 words"}});
  han.resize(han.size() - 3);
  CHECK(validate_spoken_text(han, Language::kZh).empty());
}

TEST_CASE("word counting per language") {
  CHECK(count_words("  one two\tthree  ", Language::kEn) == 3);
  CHECK(count_words("", Language::kEn) == 0);
  CHECK(count_words("你好，world和AI！", Language::kZh) == 5);
  CHECK(count_words("我 爱 你", Language::kZh) == 3);
  CHECK(detect_language("hello 世界") == Language::kZh);
  CHECK(detect_language("hello world") == Language::kEn);
}

TEST_CASE("builtin prompts match the shipped template files") {
  const PromptSet builtin = PromptSet::builtin();
  const PromptSet disk = PromptSet::from_directory(prompt_dir());
  for (auto n : {TemplateName::kRewrite, TemplateName::kSuitability, TemplateName::kClarity,
                 TemplateName::kSafety, TemplateName::kSpokenStyle, TemplateName::kS2tifJudge}) {
    std::string file = read_file(prompt_dir() / (std::string(to_string(n)) + ".txt"));
    if (!file.empty() && file.back() == '\n') file.pop_back();
    CHECK(builtin.get(n).body() == file);
    CHECK(disk.get(n).body() == file);
    CHECK(parse_template_name(to_string(n)) == n);
  }
  CHECK(builtin.get(TemplateName::kSpokenStyle).body().find("{Command}") != std::string::npos);
  CHECK(builtin.get(TemplateName::kSuitability).body().find("{\"is_suitable_for_speech\"") !=
        std::string::npos);
}

TEST_CASE("templates must carry their placeholders exactly once") {
  CHECK_NOTHROW(PromptTemplate(TemplateName::kSafety, "Q: {instruction} {\"is_safe\": x}"));
  CHECK_THROWS_AS(PromptTemplate(TemplateName::kSafety, "no slot"), PreconditionError);
  CHECK_THROWS_AS(PromptTemplate(TemplateName::kSafety, "{instruction} {instruction}"),
                  PreconditionError);
  CHECK_THROWS_AS(PromptTemplate(TemplateName::kSafety, "{instruction} {extra}"),
                  PreconditionError);
  CHECK_THROWS_AS(PromptTemplate(TemplateName::kSpokenStyle, "{instruction}"),
                  PreconditionError);
  CHECK_THROWS_AS(PromptTemplate(TemplateName::kS2tifJudge, "{instruction} only"),
                  PreconditionError);
}

TEST_CASE("fill substitutes once and never re-expands values") {
  const PromptTemplate t(TemplateName::kS2tifJudge, "I={instruction}; R={response}");
  CHECK(t.fill({{"instruction", "{response}"}, {"response", "ok"}}) == "I={response}; R=ok");
  CHECK(t.fill({{"instruction", "$1 \\n"}, {"response", ""}}) == "I=$1 \\n; R=");
}

TEST_CASE("a missing template file is reported by name") {
  testing::TempDir dir;
  for (auto n : {"rewrite", "suitability", "clarity", "safety", "spoken_style"}) {
    std::filesystem::copy_file(prompt_dir() / (std::string(n) + ".txt"),
                               dir / (std::string(n) + ".txt"));
  }
  try {
    PromptSet::from_directory(dir.path());
    FAIL("expected MissingInputError");
  } catch (const MissingInputError& e) {
    CHECK(e.artifact() == (dir / "s2tif_judge.txt").string());
  }
}

TEST_CASE("sentence splitting keeps decimals and terminator runs") {
  CHECK(split_sentences("Pi is about 3.14 today. Really? Yes!!") ==
        std::vector<std::string>{"Pi is about 3.14 today.", "Really?", "Yes!!"});
  CHECK(split_sentences("你好。再见！好") == std::vector<std::string>{"你好。", "再见！", "好"});
  CHECK(split_sentences("one\n\ntwo") == std::vector<std::string>{"one", "two"});
}

TEST_CASE("directive sentences are stripped") {
  const auto rules = DirectiveRules::defaults();
  CHECK(strip_directives("Translate the following sentence into French. The cat sleeps.",
                         rules) == "The cat sleeps.");
  CHECK(strip_directives("PLEASE SUMMARIZE THE TEXT BELOW.\nRivers flow to the sea.", rules) ==
        "Rivers flow to the sea.");
  CHECK(strip_directives("请根据以下内容回答问题。长江是中国最长的河流。", rules) ==
        "长江是中国最长的河流。");
  // Untouched text is returned byte for byte.
  CHECK(strip_directives("  Why is the sky blue?  ", rules) == "  Why is the sky blue?  ");
  CHECK(strip_directives("Input: a. Output: the longer one.", rules) == "Output: the longer one.");
  CHECK_THROWS_AS(strip_directives("   ", rules), PreconditionError);
  CHECK_THROWS_AS(DirectiveRules({"(unclosed"}), PreconditionError);
}

TEST_CASE("judge replies and completions are parsed leniently") {
  CHECK(parse_judge_bool("Sure! {\"is_safe\": false} Hope that helps.", "is_safe") == false);
  CHECK(parse_judge_bool("{\"is_safe\": true}", "is_safe") == true);
  CHECK_FALSE(parse_judge_bool("{\"is_safe\": \"yes\"}", "is_safe").has_value());
  CHECK_FALSE(parse_judge_bool("{\"safe\": true}", "is_safe").has_value());
  CHECK_FALSE(parse_judge_bool("I think it is safe.", "is_safe").has_value());
  CHECK(clean_completion("  \"'How tall is Everest?'\"  ") == "How tall is Everest?");
  CHECK(clean_completion("“为什么天是蓝的？”") == "为什么天是蓝的？");
  CHECK(clean_completion("\"unbalanced") == "\"unbalanced");
}

TEST_CASE("scripted pipeline converts numerals or rejects the pair") {
  const std::string q1 = "In what year was Napoleon born?";
  const std::string q2 = "When did the Berlin Wall fall?";
  backends::MockConfig cfg;
  cfg.chat_script[fill1(TemplateName::kRewrite, "instruction", "Napoleon birth year")] =
      "\"" + q1 + "\"";
  cfg.chat_script[fill1(TemplateName::kRewrite, "instruction", "Berlin wall")] = q2;
  script_judges(cfg, q1, true, true, true);
  script_judges(cfg, q2, true, true, true);
  cfg.chat_script[fill1(TemplateName::kSpokenStyle, "Command", q1)] =
      R"({"instruction": "Hey, what year was Napoleon born?", "response": "He was born in seventeen sixty-nine."})";
  cfg.chat_script[fill1(TemplateName::kSpokenStyle, "Command", q2)] =
      R"(Here you go: {"instruction": "When did the Berlin Wall fall?", "response": "It fell in 1989."})";
  auto clients = backends::make_clients({}, cfg, no_sleep());
  TextPipeline p(*clients, PromptSet::builtin(), DirectiveRules::defaults());

  auto a = item("a", "Napoleon birth year");
  p.run(a);
  REQUIRE(a.passed());
  CHECK(a.rewritten == q1);
  CHECK(a.spoken->response == "He was born in seventeen sixty-nine.");
  CHECK_FALSE(a.rejection().has_value());

  auto b = item("b", "Berlin wall");
  p.run(b);
  CHECK_FALSE(b.passed());
  CHECK(b.rejection() == "postprocess:style_violation:digit");
  CHECK_FALSE(b.spoken.has_value());
}

TEST_CASE("judges reject with the first failing criterion") {
  const std::string q = "How do I pick a lock?";
  backends::MockConfig cfg;
  cfg.chat_script[fill1(TemplateName::kRewrite, "instruction", "lock picking")] = q;
  script_judges(cfg, q, true, false, false);
  auto clients = backends::make_clients({}, cfg, no_sleep());
  TextPipeline p(*clients, PromptSet::builtin(), DirectiveRules::defaults());
  auto it = item("x", "lock picking");
  p.run(it);
  CHECK(it.rejection() == "filter:unclear");
  CHECK(it.postprocess.status == StageStatus::kPending);

  FilterVerdict v;
  v.suitable = v.clear = v.safe = true;
  CHECK(v.passed());
  CHECK(v.reason().empty());
  v.safe = false;
  CHECK(v.reason() == "unsafe");
  v.parse_error = true;
  CHECK(v.reason() == "judge_parse_error");
}

TEST_CASE("unparseable replies and backend failures are recorded") {
  const std::string q = "What is a comet made of?";
  backends::MockConfig cfg;
  cfg.chat_script[fill1(TemplateName::kRewrite, "instruction", "comets")] = q;
  script_judges(cfg, q, true, true, true);
  cfg.chat_script[fill1(TemplateName::kSafety, "instruction", q)] = "Probably fine.";
  auto clients = backends::make_clients({}, cfg, no_sleep());
  TextPipeline p(*clients, PromptSet::builtin(), DirectiveRules::defaults());
  auto it = item("c", "comets");
  p.run(it);
  CHECK(it.rejection() == "filter:judge_parse_error");

  backends::ModelClients failing(std::make_shared<ThrowingChat>(), nullptr, nullptr, nullptr,
                                 nullptr, nullptr, {}, no_sleep());
  TextPipeline broken(failing, PromptSet::builtin(), DirectiveRules::defaults());
  auto f = item("d", "anything");
  broken.run(f);
  CHECK(f.rejection() == "rewrite:backend_error");
  auto e = item("e", "   ");
  broken.run(e);
  CHECK(e.rejection() == "rewrite:empty_instruction");
}

TEST_CASE("mock judges reject written-content requests") {
  auto clients = backends::make_clients({}, backends::MockConfig{}, no_sleep());
  TextPipeline p(*clients, PromptSet::builtin(), DirectiveRules::defaults());
  auto poem = item("p", "A poem about autumn leaves");
  p.run(poem);
  CHECK(poem.rejection() == "filter:unsuitable");
  auto ok = item("q", "the tallest mountain in Africa");
  p.run(ok);
  REQUIRE(ok.passed());
  CHECK(validate_spoken_text(ok.spoken->response, Language::kEn).empty());
}

TEST_CASE("items round-trip through JSON and summarize by stage") {
  auto a = item("a", "x");
  a.fragment = "x";
  a.rewritten = "X?";
  a.rewrite.status = a.filter.status = a.postprocess.status = StageStatus::kPassed;
  a.spoken = SpokenPair{"X?", "Yes."};
  auto b = item("b", "y", Language::kZh);
  b.rewritten = "Y?";
  b.rewrite.status = StageStatus::kPassed;
  b.filter = {StageStatus::kRejected, "unsafe"};
  for (const auto& it : {a, b}) {
    const auto back = item_from_json(nlohmann::json::parse(item_to_json(it).dump()));
    CHECK(back.source_id == it.source_id);
    CHECK(back.language == it.language);
    CHECK(back.fragment == it.fragment);
    CHECK(back.rewritten == it.rewritten);
    CHECK(back.spoken == it.spoken);
    CHECK(back.rewrite == it.rewrite);
    CHECK(back.filter == it.filter);
    CHECK(back.postprocess == it.postprocess);
  }
  const TextReport r = summarize({a, b});
  CHECK(r.total == 2);
  CHECK(r.passed == 1);
  CHECK(r.stages.at("rewrite") == std::pair<std::size_t, std::size_t>{2, 0});
  CHECK(r.stages.at("filter") == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(r.reasons.at("filter:unsafe") == 1);
}

TEST_CASE("instruction files in JSONL and plain text") {
  testing::TempDir dir;
  {
    std::ofstream f(dir / "seeds.jsonl");
    f << R"({"id": "a1", "text": "Why is the sea salty?"})" << "\n\n"
      << R"({"id": "a2", "text": "天为什么是蓝的？"})" << "\n"
      << R"({"id": "a3", "text": "hello", "language": "zh"})" << "\n";
  }
  const auto items = read_instructions(dir / "seeds.jsonl");
  REQUIRE(items.size() == 3);
  CHECK(items[0].language == Language::kEn);
  CHECK(items[1].language == Language::kZh);
  CHECK(items[2].language == Language::kZh);
  {
    std::ofstream f(dir / "plain.txt");
    f << "first\n\n  \nthird line\n";
  }
  const auto plain = read_instructions(dir / "plain.txt");
  REQUIRE(plain.size() == 2);
  CHECK(plain[0].source_id == "plain_1");
  CHECK(plain[1].source_id == "plain_4");
  CHECK(plain[1].original == "third line");
  {
    std::ofstream f(dir / "dup.jsonl");
    f << R"({"id": "a", "text": "x"})" << "\n" << R"({"id": "a", "text": "y"})" << "\n";
  }
  CHECK_THROWS_AS(read_instructions(dir / "dup.jsonl"), PreconditionError);
  {
    std::ofstream f(dir / "bad.jsonl");
    f << R"({"id": "../etc", "text": "x"})" << "\n";
  }
  CHECK_THROWS_AS(read_instructions(dir / "bad.jsonl"), PreconditionError);
  CHECK_THROWS_AS(read_instructions(dir / "absent.jsonl"), MissingInputError);
  CHECK(is_valid_dialogue_id("inst0001"));
  CHECK_FALSE(is_valid_dialogue_id("-x"));
  CHECK_FALSE(is_valid_dialogue_id("a b"));
  CHECK_FALSE(is_valid_dialogue_id(""));
}
