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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "backends/client.hpp"
#include "json.hpp"
#include "pipeline/config.hpp"

namespace dialogsynth::pipeline {

enum class Stage { kText, kVoices, kSynth, kQa, kPartition, kStats, kEval };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);
// Execution order.
const std::vector<Stage>& all_stages();

// File layout under the output root. Every path a stage reads or writes is
// named here.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path audit() const { return root / "audit.jsonl"; }
  std::filesystem::path stage_dir(Stage s) const { return root / std::string(to_string(s)); }
  std::filesystem::path report(Stage s) const { return stage_dir(s) / "report.json"; }
  std::filesystem::path text_items() const { return stage_dir(Stage::kText) / "items.jsonl"; }
  std::filesystem::path text_dialogues() const {
    return stage_dir(Stage::kText) / "dialogues.jsonl";
  }
  std::filesystem::path identify() const { return stage_dir(Stage::kVoices) / "identify.jsonl"; }
  std::filesystem::path embeddings() const {
    return stage_dir(Stage::kVoices) / "embeddings.jsonl";
  }
  std::filesystem::path profiles() const { return stage_dir(Stage::kVoices) / "profiles.json"; }
  std::filesystem::path library() const { return stage_dir(Stage::kVoices) / "library.json"; }
  std::filesystem::path synth_metadata() const {
    return stage_dir(Stage::kSynth) / "metadata.json";
  }
  std::filesystem::path decisions() const { return stage_dir(Stage::kQa) / "decisions.jsonl"; }
  // Kept dialogues; turn audio paths resolve against this directory.
  std::filesystem::path corpus() const { return root / "corpus"; }
  std::filesystem::path corpus_metadata() const { return corpus() / "metadata.json"; }
  std::filesystem::path subset_ids(const std::string& name) const {
    return stage_dir(Stage::kPartition) / (name + ".ids");
  }
  std::filesystem::path subset_metadata(const std::string& name) const {
    return stage_dir(Stage::kPartition) / name / "metadata.json";
  }
  std::filesystem::path holdout() const { return stage_dir(Stage::kPartition) / "holdout.json"; }
  std::filesystem::path asr_manifest() const { return root / "derive" / "asr_train.jsonl"; }
  std::filesystem::path tts_manifest() const { return root / "derive" / "tts_train.jsonl"; }
  std::filesystem::path stats_json() const { return stage_dir(Stage::kStats) / "stats.json"; }
  std::filesystem::path stats_table() const { return stage_dir(Stage::kStats) / "table.txt"; }
  std::filesystem::path pipeline_report() const { return root / "report.json"; }
  std::filesystem::path s2tif() const { return stage_dir(Stage::kEval) / "s2tif.jsonl"; }
  std::filesystem::path eval_summary() const { return stage_dir(Stage::kEval) / "summary.txt"; }
};

struct AuditEntry {
  std::string reason;
  std::string detail;
};

// JSON-lines log of rejected items. Holds exactly one entry per
// (stage, item id); each stage replaces its own entries when it finishes,
// so re-runs never duplicate a rejection.
class AuditLog {
 public:
  explicit AuditLog(std::filesystem::path path);

  void replace_stage(Stage s, std::map<std::string, AuditEntry> entries);
  const AuditEntry* find(Stage s, const std::string& id) const;
  std::size_t count(Stage s) const;
  std::size_t size() const { return entries_.size(); }
  // Rewrites the file in stage order, then id order.
  void save() const;

 private:
  std::filesystem::path path_;
  std::map<std::pair<Stage, std::string>, AuditEntry> entries_;
};

// Rejection reasons caused by infrastructure rather than content. Items
// rejected for these reasons are retried by the next run.
bool is_transient_reason(std::string_view reason);

struct StageReport {
  Stage stage = Stage::kText;
  nlohmann::ordered_json report;  // also written to the stage's report.json
  std::string summary;            // one human-readable line
};

using ProgressFn = std::function<void(Stage, std::size_t done, std::size_t total)>;

class Pipeline {
 public:
  // Builds clients from the configured endpoints unless `clients` is given.
  explicit Pipeline(PipelineConfig config,
                    std::unique_ptr<backends::ModelClients> clients = nullptr);
  ~Pipeline();

  const PipelineConfig& config() const { return config_; }
  const Layout& layout() const { return layout_; }
  backends::ModelClients& clients() { return *clients_; }
  void set_progress(ProgressFn fn) { progress_ = std::move(fn); }

  // Checks inputs, prompt templates and backend reachability without
  // writing anything. Throws MissingInputError or Error(kBackendUnreachable).
  nlohmann::ordered_json dry_run();

  // Missing inputs throw MissingInputError naming the artifact. With
  // `force` the stage discards its previous outputs; otherwise items that
  // already completed are skipped.
  StageReport run(Stage s, bool force = false);
  std::vector<StageReport> run_all(bool force = false);

 private:
  StageReport run_text(bool force);
  StageReport run_voices(bool force);
  StageReport run_synth(bool force);
  StageReport run_qa(bool force);
  StageReport run_partition();
  StageReport run_stats();
  StageReport run_eval();

  void tick(Stage s, std::size_t done, std::size_t total) const;
  StageReport finish(Stage s, nlohmann::ordered_json report, std::string summary);

  PipelineConfig config_;
  Layout layout_;
  std::unique_ptr<backends::ModelClients> clients_;
  AuditLog audit_;
  ProgressFn progress_;
};

// Decodes and validates a metadata file and checks that every turn's audio
// exists next to it. Never throws for content problems; they are reported.
nlohmann::ordered_json validate_corpus(const std::filesystem::path& metadata_path,
                                       bool check_audio = true);

// Maps an error code to the process exit status: 2 for missing inputs, 3
// for unreachable backends, 1 otherwise.
int exit_code(ErrorCode code);

}  // namespace dialogsynth::pipeline
