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

#include <cmath>
#include <functional>
#include <map>

#include "backends/client.hpp"
#include "backends/mock.hpp"
#include "doctest.h"
#include "qa/eval.hpp"
#include "qa/normalize.hpp"
#include "qa/qa_filter.hpp"
#include "support.hpp"
#include "util/unicode.hpp"

using namespace dialogsynth;
using namespace dialogsynth::qa;

namespace {

std::vector<std::string> toks(std::initializer_list<const char*> xs) {
  return {xs.begin(), xs.end()};
}

// Plain recursive Levenshtein distance, memoized.
std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t v = std::min({go(i + 1, j) + 1, go(i, j + 1) + 1,
                                    go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1)});
    return memo[key] = v;
  };
  return go(0, 0);
}

struct ScriptedAsr : backends::AsrBackend {
  std::vector<std::string> replies;
  std::size_t next = 0;
  bool fail = false;
  std::string transcribe(const Waveform&, Language) override {
    if (fail) throw backends::BackendError(backends::BackendError::Kind::kFailure, "asr down");
    return replies.at(next++);
  }
};

backends::RetryPolicy no_sleep() {
  backends::RetryPolicy p;
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

corpus::DialogueRecord record(std::string user_text, std::string agent_text,
                              Language lang = Language::kEn) {
  corpus::DialogueRecord r;
  r.id = "d1";
  r.speakers = {{"SPK1m", Role::kUser, Gender::kMale}, {"agentFemale", Role::kAgent, Gender::kFemale}};
  r.channels = {{0, lang}, {1, lang}};
  r.dialog = {{0, "SPK1m", std::move(user_text), 0.0, 1.0, "d1/d1_0_mark.wav"},
              {1, "agentFemale", std::move(agent_text), 1.0, 2.0, "d1/d1_1_mark.wav"}};
  r.audio.duration = 2.0;
  return r;
}

}  // namespace

TEST_CASE("published error-rate examples") {
  // One substitution and one deletion over six reference words.
  const auto wer = edit_distance(toks({"the", "cat", "sat", "on", "the", "mat"}),
                                 toks({"the", "cat", "sit", "on", "mat"}));
  CHECK(wer.substitutions == 1);
  CHECK(wer.deletions == 1);
  CHECK(wer.insertions == 0);
  CHECK(wer.rate() == doctest::Approx(2.0 / 6.0));
  const auto ref = normalize_text("今天天气好", Language::kZh);
  const auto hyp = normalize_text("今天天汽好", Language::kZh);
  const auto cer = edit_distance(ref, hyp);
  CHECK(cer.ref_len == 5);
  CHECK(cer.substitutions == 1);
  CHECK(cer.rate() == doctest::Approx(0.2));
}

TEST_CASE("insertions can push the rate above one") {
  const auto r = edit_distance(toks({"a"}), toks({"a", "b", "c"}));
  CHECK(r.insertions == 2);
  CHECK(r.rate() == 2.0);
  CHECK_THROWS_AS(edit_distance({}, toks({"a"})), PreconditionError);
  ErrorRateReport sum = r;
  sum += edit_distance(toks({"x", "y"}), toks({"x"}));
  CHECK(sum == ErrorRateReport{0, 1, 2, 3});
  CHECK(sum.rate() == 1.0);
}

TEST_CASE("alignment prefers substitutions, then deletions") {
  // "ab" -> "ba": two substitutions rather than a deletion plus an insertion.
  const std::string a = "ab", b = "ba";
  const auto r = align<char>(a, b);
  CHECK(r == ErrorRateReport{2, 0, 0, 2});
  const std::string c = "abc", d = "xbc";
  CHECK(align<char>(c, d) == ErrorRateReport{1, 0, 0, 3});
}

TEST_CASE("edit counts agree with a recursive oracle on short strings") {
  Rng rng(6);
  for (int t = 0; t < 2000; ++t) {
    std::string a, b;
    const auto la = rng.index(7), lb = rng.index(7);
    for (std::size_t i = 0; i < la; ++i) a += static_cast<char>('a' + rng.index(3));
    for (std::size_t i = 0; i < lb; ++i) b += static_cast<char>('a' + rng.index(3));
    const auto r = align<char>(a, b);
    CHECK(r.edits() == levenshtein(a, b));
    // The path must account for both lengths.
    CHECK(r.ref_len - r.deletions + r.insertions == b.size());
  }
}

TEST_CASE("normalization per language") {
  CHECK(normalize_text("Hello, World! It's 42.", Language::kEn) ==
        toks({"hello", "world", "its", "four", "two"}));
  CHECK(normalize_text("ＡＢＣ  def", Language::kEn) == toks({"abc", "def"}));
  CHECK(normalize_text("我有3个苹果。", Language::kZh) ==
        toks({"我", "有", "三", "个", "苹", "果"}));
  CHECK(normalize_text("用 Python 写", Language::kZh) == toks({"用", "Python", "写"}));
  CHECK(normalize_text("?!", Language::kEn).empty());
  CHECK(join_tokens(toks({"a", "b"})) == "a b");
}

TEST_CASE("transcript scoring ignores case and punctuation") {
  CHECK(score_transcript("Hello, there!", "hello there", Language::kEn).edits() == 0);
  CHECK(score_transcript("?!", "anything", Language::kEn).ref_len == 0);
  const auto r = score_transcript("one two three", "one too three four", Language::kEn);
  CHECK(r == ErrorRateReport{1, 0, 1, 3});
}

TEST_CASE("QA gate pools both turns and keeps at the threshold") {
  auto asr = std::make_shared<ScriptedAsr>();
  backends::ModelClients clients(nullptr, nullptr, asr, nullptr, nullptr, nullptr, {},
                                 no_sleep());
  const std::vector<Waveform> audio(2, Waveform{std::vector<float>(1600, 0.1f), 16000});
  // 10 reference words; 1 error pooled is 0.10, which is kept.
  const auto r = record("one two three four five", "six seven eight nine ten");
  asr->replies = {"one two three four five", "six seven eight nine tan"};
  auto d = qa_filter(clients, r, audio);
  CHECK(d.keep);
  CHECK(d.rate == doctest::Approx(0.1));
  CHECK(d.threshold == 0.10);
  CHECK(d.turns.size() == 2);
  CHECK(d.drop_reason.empty());
  asr->replies = {"one two three four", "six seven eight nine tan"};
  asr->next = 0;
  d = qa_filter(clients, r, audio);
  CHECK_FALSE(d.keep);
  CHECK(d.drop_reason == "error_rate");
  CHECK(d.total == ErrorRateReport{1, 1, 0, 10});

  const auto j = decision_to_json(d);
  CHECK(j.at("id") == "d1");
  CHECK(j.at("metric") == "wer");
  CHECK(j.at("turns").size() == 2);

  asr->fail = true;
  d = qa_filter(clients, r, audio);
  CHECK_FALSE(d.keep);
  CHECK(d.drop_reason == "asr_error");
  CHECK_THROWS_AS(qa_filter(clients, r, std::span(audio).first(1)), PreconditionError);
}

TEST_CASE("Chinese dialogues use the character threshold") {
  auto asr = std::make_shared<ScriptedAsr>();
  backends::ModelClients clients(nullptr, nullptr, asr, nullptr, nullptr, nullptr, {},
                                 no_sleep());
  const std::vector<Waveform> audio(2, Waveform{std::vector<float>(1600, 0.1f), 16000});
  // 20 characters; one error is 0.05 and kept, two are 0.10 and dropped.
  const auto r = record("一二三四五六七八九十", "十九八七六五四三二一", Language::kZh);
  asr->replies = {"一二三四五六七八九十", "十九八七六五四三二二"};
  auto d = qa_filter(clients, r, audio);
  CHECK(d.keep);
  CHECK(d.threshold == 0.05);
  asr->replies = {"一二三四五六七八九九", "十九八七六五四三二二"};
  asr->next = 0;
  CHECK_FALSE(qa_filter(clients, r, audio).keep);
}

TEST_CASE("mock recognizer corrupts characters at the configured rate") {
  backends::MockConfig cfg;
  cfg.seed = 77;
  cfg.char_error_rate = 0.05;
  backends::MockAsr asr(cfg);
  backends::MockTts tts;
  Rng rng(1);
  std::size_t n = 0, wrong = 0;
  for (int block = 0; block < 10; ++block) {
    std::string text;
    for (int i = 0; i < 400; ++i) text += static_cast<char>('a' + rng.index(26));
    // Replacement tones may decode outside ASCII, so compare code points.
    const auto hyp =
        unicode::decode_utf8(asr.transcribe(tts.synthesize(text, {}, 16000), Language::kEn));
    REQUIRE(hyp.size() == text.size());
    for (std::size_t i = 0; i < text.size(); ++i) wrong += hyp[i] != static_cast<char32_t>(text[i]);
    n += text.size();
  }
  const double p = 0.05 * 511.0 / 512.0;  // a replacement may hit the same tone
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(wrong) / n - p) < 4 * sigma);
}

TEST_CASE("S2TIF replies are parsed strictly") {
  CHECK(parse_s2tif(R"({"content": 4, "style": 5})") == S2tifScore{4, 5, 0});
  CHECK(parse_s2tif("Scores: {\"content\": 1, \"style\": 3} thanks") == S2tifScore{1, 3, 0});
  CHECK_THROWS_AS(parse_s2tif(R"({"content": 6, "style": 5})"), ParseError);
  CHECK_THROWS_AS(parse_s2tif(R"({"content": 4.5, "style": 5})"), ParseError);
  CHECK_THROWS_AS(parse_s2tif(R"({"content": 4})"), ParseError);
  CHECK_THROWS_AS(parse_s2tif("no scores here"), ParseError);
}

TEST_CASE("S2TIF judging and modality alignment with the mocks") {
  auto clients = backends::make_clients({}, backends::MockConfig{});
  const auto prompts = text::PromptSet::builtin();
  const auto s = s2tif_judge(*clients, prompts, "what is rain", "Rain is water falling from clouds.",
                             Language::kEn);
  CHECK(s.content >= 3);
  CHECK(s.content <= 5);
  CHECK(s.response_length == 6);
  const auto zh = s2tif_judge(*clients, prompts, "什么是雨", "雨是水。", Language::kZh);
  CHECK(zh.response_length == 3);

  const std::string text = "Rain is water falling from clouds.";
  const Waveform audio = clients->synthesize(text, {"agentMale", {1.0}});
  const auto r = modality_alignment(*clients, text, audio, Language::kEn);
  CHECK(r.edits() == 0);
  CHECK(r.ref_len == 6);
}

TEST_CASE("quality summaries use population deviation") {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto s = summarize_scores(xs);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.n == 4);
  CHECK(s.render() == "2.50 ± 1.12");
  CHECK_THROWS_AS(summarize_scores(std::vector<double>{}), PreconditionError);
  CHECK(format_fixed(3.14159) == "3.14");
  CHECK(format_fixed(2.0, 1) == "2.0");
}
