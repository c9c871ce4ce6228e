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

#include <cstdlib>
#include <fstream>
#include <set>

#include "backends/mock.hpp"
#include "corpus/metadata.hpp"
#include "doctest.h"
#include "pipeline/config.hpp"
#include "pipeline/fixtures.hpp"
#include "pipeline/pipeline.hpp"
#include "support.hpp"
#include "util/io.hpp"

using namespace dialogsynth;
using namespace dialogsynth::pipeline;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ThrowingChat : backends::ChatBackend {
  std::string complete(std::string_view, const backends::ChatParams&) override {
    throw backends::BackendError(backends::BackendError::Kind::kTransport, "connection reset");
  }
};

std::unique_ptr<backends::ModelClients> clients_with_broken_chat(const PipelineConfig& c) {
  backends::RetryPolicy retry;
  retry.sleep = [](std::chrono::milliseconds) {};
  return std::make_unique<backends::ModelClients>(
      std::make_shared<ThrowingChat>(), std::make_shared<backends::MockTts>(),
      std::make_shared<backends::MockAsr>(c.mock), nullptr,
      std::make_shared<backends::MockEmbed>(c.mock), std::make_shared<backends::MockMos>(c.mock),
      std::map<backends::BackendKind, backends::ModelClients::Slot>{}, retry);
}

PipelineConfig demo_config(const testing::TempDir& dir, std::size_t n = 40) {
  DemoOptions opt;
  opt.instructions = n;
  return load_config(write_demo_fixtures(dir.path(), opt));
}

std::vector<json> audit_rows(const fs::path& p) {
  std::vector<json> rows;
  std::ifstream f(p);
  for (std::string line; std::getline(f, line);) rows.push_back(json::parse(line));
  return rows;
}

std::string slurp_reports(const Layout& l) {
  std::string all;
  for (Stage s : all_stages()) all += read_file(l.report(s));
  return all + read_file(l.corpus_metadata()) + read_file(l.library()) + read_file(l.audit());
}

}  // namespace

TEST_CASE("stage names") {
  CHECK(all_stages().size() == 7);
  for (Stage s : all_stages()) CHECK(parse_stage(to_string(s)) == s);
  CHECK(to_string(Stage::kQa) == "qa");
  CHECK_THROWS_AS(parse_stage("vocode"), PreconditionError);
}

TEST_CASE("transient reasons") {
  CHECK(is_transient_reason("backend_error"));
  CHECK(is_transient_reason("filter:backend_error"));
  CHECK(is_transient_reason("tts_error"));
  CHECK(is_transient_reason("asr_error"));
  CHECK_FALSE(is_transient_reason("unsafe"));
  CHECK_FALSE(is_transient_reason("error_rate"));
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorCode::kMissingInput) == 2);
  CHECK(exit_code(ErrorCode::kBackendUnreachable) == 3);
  CHECK(exit_code(ErrorCode::kValidation) == 1);
  CHECK(exit_code(ErrorCode::kBackend) == 1);
}

TEST_CASE("config parsing, defaults and overrides") {
  testing::TempDir dir;
  const auto c = parse_config(json{{"seed", 5}}, dir.path());
  CHECK(c.seed == 5);
  CHECK(c.mock.seed == 5);
  CHECK(c.watermark_key == 5);
  CHECK(c.output_root == dir / "out");
  CHECK(c.wer_threshold == 0.10);
  CHECK(c.cer_threshold == 0.05);
  CHECK(c.similarity_threshold == 0.97);

  const auto o = parse_config(json{{"seed", 5}, {"inputs", {{"instructions", "in/x.jsonl"}}}},
                              dir.path(),
                              {"thresholds.wer_en=0.2", "partition.subsets=[\"XS\"]",
                               "output_root=elsewhere", "mock.seed=9"});
  CHECK(o.wer_threshold == 0.2);
  CHECK(o.subsets == std::vector<std::string>{"XS"});
  CHECK(o.output_root == dir / "elsewhere");
  CHECK(o.instructions == dir / "in/x.jsonl");
  CHECK(o.mock.seed == 9);

  CHECK_THROWS_AS(parse_config(json{{"seed", 1}, {"sed", 2}}, dir.path()), PreconditionError);
  CHECK_THROWS_AS(parse_config(json{{"seed", -1}}, dir.path()), PreconditionError);
  CHECK_THROWS_AS(parse_config(json::object(), dir.path()), PreconditionError);
  CHECK_THROWS_AS(parse_config(json{{"seed", 1}, {"thresholds", {{"wer_en", 1.5}}}}, dir.path()),
                  PreconditionError);
  CHECK_THROWS_AS(parse_config(json{{"seed", 1}, {"thresholds", {{"typo", 1}}}}, dir.path()),
                  PreconditionError);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), MissingInputError);
  write_file(dir / "broken.json", "{\"seed\": ");
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ParseError);
}

TEST_CASE("endpoint settings come from the file and the environment") {
  testing::TempDir dir;
  const json j = {{"seed", 1},
                  {"backends",
                   {{"asr", {{"mode", "http"}, {"address", "http://a:1"}, {"max_in_flight", 2}}},
                    {"tts", {{"mode", "subprocess"}, {"address", "tts-server --stdio"}}}}}};
  ::setenv("DIALOGSYNTH_ASR_ADDRESS", "http://b:2", 1);
  ::setenv("DIALOGSYNTH_ASR_TOKEN", "t0k", 1);
  const auto c = parse_config(j, dir.path());
  ::unsetenv("DIALOGSYNTH_ASR_ADDRESS");
  ::unsetenv("DIALOGSYNTH_ASR_TOKEN");
  REQUIRE(c.endpoints.size() == 2);
  const auto& asr = c.endpoints[0].kind == backends::BackendKind::kAsr ? c.endpoints[0]
                                                                        : c.endpoints[1];
  CHECK(asr.mode == backends::BackendMode::kHttp);
  CHECK(asr.address == "http://b:2");
  CHECK(asr.bearer_token == "t0k");
  CHECK(asr.max_in_flight == 2);
  const std::string shown = config_to_json(c).dump();
  CHECK(shown.find("t0k") == std::string::npos);
  CHECK(shown.find("<set>") != std::string::npos);
  CHECK_THROWS_AS(parse_config(json{{"seed", 1}, {"backends", {{"vocoder", json::object()}}}},
                               dir.path()),
                  PreconditionError);
}

TEST_CASE("audit log keeps one entry per stage and item") {
  testing::TempDir dir;
  {
    AuditLog log(dir / "audit.jsonl");
    log.replace_stage(Stage::kText, {{"b", {"unsafe", ""}}, {"a", {"unclear", "x"}}});
    log.replace_stage(Stage::kQa, {{"a", {"error_rate", "0.2"}}});
    log.replace_stage(Stage::kText, {{"a", {"unclear", "y"}}});
    CHECK(log.size() == 2);
    CHECK(log.count(Stage::kText) == 1);
    CHECK(log.find(Stage::kText, "b") == nullptr);
    CHECK(log.find(Stage::kText, "a")->detail == "y");
    log.save();
  }
  const auto rows = audit_rows(dir / "audit.jsonl");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].at("stage") == "text");
  CHECK(rows[1].at("stage") == "qa");
  AuditLog again(dir / "audit.jsonl");
  CHECK(again.size() == 2);
  CHECK(again.find(Stage::kQa, "a")->reason == "error_rate");
}

TEST_CASE("a full mock run produces a valid corpus and reports") {
  testing::TempDir dir;
  Pipeline p(demo_config(dir));
  std::map<Stage, std::size_t> ticks;
  p.set_progress([&](Stage s, std::size_t, std::size_t) { ++ticks[s]; });
  const auto reports = p.run_all();
  REQUIRE(reports.size() == 7);
  const Layout& l = p.layout();
  CHECK(ticks[Stage::kText] == 40);

  const auto text = reports[0].report;
  CHECK(text.at("total") == 40);
  const std::size_t passed = text.at("passed");
  CHECK(passed + text.at("rejected").get<std::size_t>() == 40);
  CHECK(reports[2].report.at("synthesized") == passed);

  const auto validation = validate_corpus(l.corpus_metadata());
  CHECK(validation.at("valid") == true);
  const auto kept = corpus::decode_metadata(read_file(l.corpus_metadata()));
  CHECK(kept.size() == reports[3].report.at("kept").get<std::size_t>());
  CHECK(corpus::encode_metadata(kept) == read_file(l.corpus_metadata()));

  // Every rejected instruction has exactly one audit entry.
  const auto rows = audit_rows(l.audit());
  std::set<std::pair<std::string, std::string>> keys;
  std::size_t text_rows = 0;
  for (const auto& r : rows) {
    CHECK(keys.insert({r.at("stage").get<std::string>(), r.at("id").get<std::string>()}).second);
    text_rows += r.at("stage") == "text";
  }
  CHECK(text_rows == 40 - passed);

  CHECK(reports[4].report.at("nested") == true);
  CHECK(reports[4].report.at("speaker_coverage") == true);
  CHECK(fs::exists(l.subset_ids("XS")));
  CHECK(validate_corpus(l.subset_metadata("S")).at("valid") == true);
  CHECK(fs::exists(l.asr_manifest()));
  CHECK(fs::exists(l.stats_table()));
  CHECK(fs::exists(l.pipeline_report()));
  CHECK(fs::exists(l.eval_summary()));
  // Reports carry no absolute paths.
  CHECK(slurp_reports(l).find(dir.path().string()) == std::string::npos);
}

TEST_CASE("re-runs skip finished work and leave outputs unchanged") {
  testing::TempDir dir;
  const auto cfg = demo_config(dir);
  Pipeline(cfg).run_all();
  const std::string before = slurp_reports(Layout{cfg.output_root});

  Pipeline again(cfg);
  std::map<Stage, std::size_t> ticks;
  again.set_progress([&](Stage s, std::size_t, std::size_t) { ++ticks[s]; });
  const auto reports = again.run_all();
  CHECK(ticks[Stage::kText] == 0);
  CHECK(ticks[Stage::kSynth] == 0);
  CHECK(ticks[Stage::kQa] == 0);
  CHECK(reports[0].summary.find("0 processed") != std::string::npos);
  CHECK(slurp_reports(Layout{cfg.output_root}) == before);

  // A forced stage reprocesses everything and reproduces the same output.
  ticks.clear();
  again.run(Stage::kText, true);
  CHECK(ticks[Stage::kText] == 40);
  CHECK(slurp_reports(Layout{cfg.output_root}) == before);
}

TEST_CASE("two fresh runs with the same seed are identical") {
  testing::TempDir a, b;
  const auto ca = demo_config(a, 30);
  const auto cb = demo_config(b, 30);
  Pipeline(ca).run_all();
  Pipeline(cb).run_all();
  CHECK(slurp_reports(Layout{ca.output_root}) == slurp_reports(Layout{cb.output_root}));
}

TEST_CASE("backend failures are retried by the next run") {
  testing::TempDir dir;
  const auto cfg = demo_config(dir, 20);
  {
    Pipeline broken(cfg, clients_with_broken_chat(cfg));
    const auto r = broken.run(Stage::kText);
    CHECK(r.report.at("passed") == 0);
    CHECK(r.report.at("reasons").at("rewrite:backend_error") == 20);
  }
  AuditLog failed(Layout{cfg.output_root}.audit());
  CHECK(failed.count(Stage::kText) == 20);

  Pipeline healthy(cfg);
  std::size_t ticks = 0;
  healthy.set_progress([&](Stage, std::size_t, std::size_t) { ++ticks; });
  const auto r = healthy.run(Stage::kText);
  CHECK(ticks == 20);
  CHECK(r.report.at("passed").get<int>() > 0);
  AuditLog after(Layout{cfg.output_root}.audit());
  for (const auto& [reason, n] : r.report.at("reasons").items()) {
    CHECK_FALSE(is_transient_reason(reason));
  }
  CHECK(after.count(Stage::kText) == 20 - r.report.at("passed").get<std::size_t>());
}

TEST_CASE("missing inputs are named") {
  testing::TempDir dir;
  auto cfg = demo_config(dir, 10);
  {
    Pipeline p(cfg);
    try {
      p.run(Stage::kSynth);
      FAIL("expected MissingInputError");
    } catch (const MissingInputError& e) {
      CHECK(e.artifact().find("dialogues.jsonl") != std::string::npos);
    }
  }
  cfg.instructions = dir / "nope.jsonl";
  Pipeline p(cfg);
  CHECK_THROWS_AS(p.run(Stage::kText), MissingInputError);
  CHECK_THROWS_AS(p.dry_run(), MissingInputError);
}

TEST_CASE("a missing prompt template stops the run before any work") {
  testing::TempDir dir;
  auto cfg = demo_config(dir, 10);
  fs::create_directories(dir / "prompts");
  for (auto n : {"rewrite", "suitability", "clarity", "safety", "s2tif_judge"}) {
    fs::copy_file(fs::path(DS_SOURCE_DIR) / "data/prompts" / (std::string(n) + ".txt"),
                  dir / "prompts" / (std::string(n) + ".txt"));
  }
  cfg.prompts_dir = dir / "prompts";
  Pipeline p(cfg);
  try {
    p.run(Stage::kText);
    FAIL("expected MissingInputError");
  } catch (const MissingInputError& e) {
    CHECK(e.artifact().find("spoken_style.txt") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(p.layout().text_items()));
}

TEST_CASE("dry run reports inputs without writing") {
  testing::TempDir dir;
  const auto cfg = demo_config(dir, 10);
  Pipeline p(cfg);
  const auto j = p.dry_run();
  CHECK(j.at("inputs").at("instructions") == "present");
  CHECK(j.at("inputs").at("responses") == "not configured");
  CHECK(j.at("backends") == "reachable");
  CHECK_FALSE(fs::exists(cfg.output_root / "text"));
}

TEST_CASE("corpus validation reports problems as data") {
  testing::TempDir dir;
  write_file(dir / "metadata.json", "[{\"id\": 1}]");
  const auto bad = validate_corpus(dir / "metadata.json");
  CHECK(bad.at("valid") == false);
  CHECK(bad.contains("error"));
  write_file(dir / "metadata.json", "[]");
  CHECK(validate_corpus(dir / "metadata.json").at("valid") == true);
}
