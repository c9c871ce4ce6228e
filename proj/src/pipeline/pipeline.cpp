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

#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "corpus/metadata.hpp"
#include "corpus/store.hpp"
#include "corpus/validate.hpp"
#include "ops/corpus_ops.hpp"
#include "ops/partition.hpp"
#include "qa/eval.hpp"
#include "qa/qa_filter.hpp"
#include "synth/dialogue.hpp"
#include "synth/wav.hpp"
#include "synth/watermark.hpp"
#include "text/text_pipeline.hpp"
#include "util/error.hpp"
#include "util/io.hpp"
#include "util/parallel.hpp"
#include "voices/voice_library.hpp"

namespace dialogsynth::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 7> kStageNames = {{
    {Stage::kText, "text"},
    {Stage::kVoices, "voices"},
    {Stage::kSynth, "synth"},
    {Stage::kQa, "qa"},
    {Stage::kPartition, "partition"},
    {Stage::kStats, "stats"},
    {Stage::kEval, "eval"},
}};

void require(const fs::path& path, std::string_view what) {
  if (path.empty()) throw MissingInputError(std::string(what) + " (not configured)");
  if (!fs::exists(path)) throw MissingInputError(path.string());
}

void write_json(const fs::path& path, const ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

void write_lines(const fs::path& path, const std::vector<ordered_json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<ordered_json> read_lines(const fs::path& path) {
  std::vector<ordered_json> rows;
  if (!fs::exists(path)) return rows;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      try {
        rows.push_back(ordered_json::parse(line));
      } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), offset + e.byte);
      }
    }
    offset += line.size() + 1;
  }
  return rows;
}

ordered_json read_json(const fs::path& path) {
  require(path, path.string());
  try {
    return ordered_json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::vector<corpus::DialogueRecord> load_corpus(const fs::path& path) {
  require(path, path.string());
  return corpus::load_metadata(path);
}

std::vector<std::string> read_ids(const fs::path& path) {
  require(path, path.string());
  std::vector<std::string> ids;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

std::vector<Waveform> load_turns(const corpus::CorpusStore& store,
                                 const corpus::DialogueRecord& r) {
  std::vector<Waveform> out;
  out.reserve(r.dialog.size());
  for (const auto& t : r.dialog) {
    const fs::path p = store.resolve(t);
    if (!fs::exists(p)) throw MissingInputError(p.string());
    out.push_back(wav::read(p));
  }
  return out;
}

ordered_json summary_json(const qa::QualitySummary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}, {"display", s.render()}};
}

ordered_json language_map(const std::map<Language, double>& m) {
  ordered_json j = ordered_json::object();
  for (Language l : {Language::kZh, Language::kEn}) {
    auto it = m.find(l);
    j[std::string(to_string(l))] = it == m.end() ? 0.0 : it->second;
  }
  return j;
}

// Re-runs skip completed items; the count goes to the summary line only so
// reports stay identical across re-runs.
std::string processed_note(std::size_t processed, std::size_t total) {
  if (processed == total) return {};
  return " (" + std::to_string(processed) + " processed, " + std::to_string(total - processed) +
         " already complete)";
}

}  // namespace

std::string_view to_string(Stage s) {
  for (const auto& [stage, name] : kStageNames) {
    if (stage == s) return name;
  }
  throw Error(ErrorCode::kInternal, "unknown stage");
}

Stage parse_stage(std::string_view s) {
  for (const auto& [stage, name] : kStageNames) {
    if (name == s) return stage;
  }
  throw PreconditionError("unknown stage '" + std::string(s) + "'");
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> kAll = [] {
    std::vector<Stage> v;
    for (const auto& [stage, name] : kStageNames) v.push_back(stage);
    return v;
  }();
  return kAll;
}

bool is_transient_reason(std::string_view reason) {
  return reason.ends_with("backend_error") || reason == "tts_error" ||
         reason == "asr_error" || reason == "embed_error";
}

// ---------------------------------------------------------------------------

AuditLog::AuditLog(fs::path path) : path_(std::move(path)) {
  for (const auto& row : read_lines(path_)) {
    entries_[{parse_stage(row.at("stage").get<std::string>()), row.at("id").get<std::string>()}] =
        AuditEntry{row.at("reason").get<std::string>(), row.value("detail", std::string())};
  }
}

void AuditLog::replace_stage(Stage s, std::map<std::string, AuditEntry> entries) {
  std::erase_if(entries_, [s](const auto& kv) { return kv.first.first == s; });
  for (auto& [id, e] : entries) entries_[{s, id}] = std::move(e);
}

const AuditEntry* AuditLog::find(Stage s, const std::string& id) const {
  auto it = entries_.find({s, id});
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t AuditLog::count(Stage s) const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [s](const auto& kv) { return kv.first.first == s; }));
}

void AuditLog::save() const {
  std::vector<ordered_json> rows;
  rows.reserve(entries_.size());
  for (const auto& [key, e] : entries_) {
    ordered_json j;
    j["stage"] = to_string(key.first);
    j["id"] = key.second;
    j["reason"] = e.reason;
    if (!e.detail.empty()) j["detail"] = e.detail;
    rows.push_back(std::move(j));
  }
  write_lines(path_, rows);
}

// ---------------------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config, std::unique_ptr<backends::ModelClients> clients)
    : config_(std::move(config)),
      layout_{config_.output_root},
      clients_(std::move(clients)),
      audit_(layout_.audit()) {
  validate(config_);
  if (!clients_) clients_ = backends::make_clients(config_.endpoints, config_.mock);
}

Pipeline::~Pipeline() = default;

void Pipeline::tick(Stage s, std::size_t done, std::size_t total) const {
  if (progress_) progress_(s, done, total);
}

StageReport Pipeline::finish(Stage s, ordered_json report, std::string summary) {
  write_json(layout_.report(s), report);
  audit_.save();
  return StageReport{s, std::move(report), std::move(summary)};
}

namespace {

text::PromptSet load_prompts(const PipelineConfig& c) {
  text::PromptSet set = c.prompts_dir.empty() ? text::PromptSet::builtin()
                                              : text::PromptSet::from_directory(c.prompts_dir);
  for (const auto& [name, path] : c.prompt_files) {
    set.set(text::load_template(text::parse_template_name(name), path));
  }
  return set;
}

text::DirectiveRules load_rules(const PipelineConfig& c) {
  return c.directive_patterns ? text::DirectiveRules(*c.directive_patterns)
                              : text::DirectiveRules::defaults();
}

}  // namespace

ordered_json Pipeline::dry_run() {
  ordered_json j;
  j["config"] = config_to_json(config_);
  load_prompts(config_);
  load_rules(config_);
  ordered_json inputs = ordered_json::object();
  auto probe = [&](const char* name, const fs::path& p, bool required) {
    if (required) require(p, name);
    inputs[name] = p.empty() ? "not configured" : (fs::exists(p) ? "present" : "missing");
  };
  probe("instructions", config_.instructions, true);
  probe("clips", config_.clips, true);
  probe("responses", config_.responses, false);
  j["inputs"] = std::move(inputs);
  clients_->check_health();
  j["backends"] = "reachable";
  return j;
}

StageReport Pipeline::run(Stage s, bool force) {
  switch (s) {
    case Stage::kText: return run_text(force);
    case Stage::kVoices: return run_voices(force);
    case Stage::kSynth: return run_synth(force);
    case Stage::kQa: return run_qa(force);
    case Stage::kPartition: return run_partition();
    case Stage::kStats: return run_stats();
    case Stage::kEval: return run_eval();
  }
  throw Error(ErrorCode::kInternal, "unknown stage");
}

std::vector<StageReport> Pipeline::run_all(bool force) {
  std::vector<StageReport> out;
  for (Stage s : all_stages()) out.push_back(run(s, force));
  return out;
}

// ---------------------------------------------------------------------------
// text: rewrite, filter and spoken-style post-processing.

StageReport Pipeline::run_text(bool force) {
  require(config_.instructions, "instructions");
  const text::PromptSet prompts = load_prompts(config_);
  const text::DirectiveRules rules = load_rules(config_);
  std::vector<text::InstructionItem> items = text::read_instructions(config_.instructions);

  std::map<std::string, text::InstructionItem> previous;
  if (!force) {
    for (const auto& row : read_lines(layout_.text_items())) {
      text::InstructionItem item = text::item_from_json(row);
      const auto rejection = item.rejection();
      if (item.passed() || (rejection && !is_transient_reason(*rejection))) {
        previous.emplace(item.source_id, std::move(item));
      }
    }
  }
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto it = previous.find(items[i].source_id);
    if (it != previous.end() && it->second.original == items[i].original) {
      items[i] = it->second;
    } else {
      pending.push_back(i);
    }
  }
  if (!pending.empty()) clients_->check_health();

  const text::TextPipeline tp(*clients_, prompts, rules,
                              {config_.chat_temperature, config_.chat_max_tokens});
  std::atomic<std::size_t> done{0};
  parallel_for(pending.size(), config_.workers, [&](std::size_t k) {
    tp.run(items[pending[k]]);
    tick(Stage::kText, ++done, pending.size());
  });

  std::vector<ordered_json> item_rows;
  std::vector<ordered_json> dialogue_rows;
  std::map<std::string, AuditEntry> rejected;
  for (const auto& item : items) {
    item_rows.push_back(text::item_to_json(item));
    if (item.passed()) {
      ordered_json d;
      d["id"] = item.source_id;
      d["language"] = to_string(item.language);
      d["instruction"] = item.spoken->instruction;
      d["response"] = item.spoken->response;
      dialogue_rows.push_back(std::move(d));
    } else if (auto r = item.rejection()) {
      rejected[item.source_id] = AuditEntry{*r, {}};
    }
  }
  write_lines(layout_.text_items(), item_rows);
  write_lines(layout_.text_dialogues(), dialogue_rows);
  audit_.replace_stage(Stage::kText, std::move(rejected));

  const text::TextReport tr = text::summarize(items);
  ordered_json report;
  report["total"] = tr.total;
  report["passed"] = tr.passed;
  report["rejected"] = tr.total - tr.passed;
  ordered_json stages = ordered_json::object();
  for (const char* name : {"rewrite", "filter", "postprocess"}) {
    const auto& [p, r] = tr.stages.at(name);
    stages[name] = {{"passed", p}, {"rejected", r}};
  }
  report["stages"] = std::move(stages);
  report["reasons"] = tr.reasons;
  std::map<std::string, std::size_t> by_lang;
  for (const auto& item : items) {
    if (item.passed()) ++by_lang[std::string(to_string(item.language))];
  }
  report["passed_by_language"] = by_lang;
  return finish(Stage::kText, std::move(report),
                "text: " + std::to_string(tr.passed) + " of " + std::to_string(tr.total) +
                    " instructions passed" + processed_note(pending.size(), items.size()));
}

// ---------------------------------------------------------------------------
// voices: real-speaker identification and the virtual voice library.

StageReport Pipeline::run_voices(bool force) {
  require(config_.clips, "clips");
  const std::vector<voices::ClipMeta> clips = voices::read_clip_manifest(config_.clips);
  const fs::path base = config_.clips.parent_path();
  auto premium = voices::select_premium_recordings(clips, config_.dnsmos_min, config_.min_clips);

  std::map<std::string, voices::Embedding> cache;
  if (!force) {
    for (const auto& row : read_lines(layout_.embeddings())) {
      cache[row.at("clip_id").get<std::string>()] =
          row.at("embedding").get<voices::Embedding>();
    }
  }

  std::vector<std::string> recordings;
  for (const auto& [id, group] : premium) recordings.push_back(id);
  bool needs_backend = false;
  for (const auto& [id, group] : premium) {
    for (const auto& c : group) {
      if (!c.embedding && !cache.count(c.clip_id)) {
        needs_backend = true;
        require(base / c.audio_path, "clip audio");
      }
    }
  }
  if (needs_backend) clients_->check_health();

  struct Slot {
    std::vector<voices::Embedding> embeddings;
    std::map<std::string, voices::Embedding> computed;
    std::optional<voices::IdentifyOutcome> outcome;
    std::string error;
  };
  std::vector<Slot> slots(recordings.size());
  std::atomic<std::size_t> done{0};
  parallel_for(recordings.size(), config_.workers, [&](std::size_t i) {
    Slot& slot = slots[i];
    const auto& group = premium.at(recordings[i]);
    try {
      for (const auto& c : group) {
        if (c.embedding) {
          slot.embeddings.push_back(*c.embedding);
        } else if (auto it = cache.find(c.clip_id); it != cache.end()) {
          slot.embeddings.push_back(it->second);
        } else {
          auto e = clients_->embed_speaker(wav::read(base / c.audio_path));
          slot.computed[c.clip_id] = e;
          slot.embeddings.push_back(std::move(e));
        }
      }
      slot.outcome = voices::identify_real_speaker(recordings[i], group, slot.embeddings,
                                                   config_.similarity_threshold);
    } catch (const backends::BackendError& e) {
      slot.error = e.what();
    }
    tick(Stage::kVoices, ++done, recordings.size());
  });

  std::map<std::string, AuditEntry> rejected;
  std::map<std::string, std::size_t> premium_count;
  std::set<std::string> all_recordings;
  for (const auto& c : clips) {
    all_recordings.insert(c.recording_id);
    if (c.dnsmos >= config_.dnsmos_min) ++premium_count[c.recording_id];
  }
  for (const auto& r : all_recordings) {
    if (!premium.count(r)) {
      rejected[r] = AuditEntry{"too_few_premium_clips",
                               std::to_string(premium_count[r]) + " premium clips, " +
                                   std::to_string(config_.min_clips) + " required"};
    }
  }

  std::vector<voices::SpeakerProfile> profiles;
  std::vector<ordered_json> identify_rows;
  std::vector<ordered_json> embedding_rows;
  for (auto& [clip_id, e] : cache) {
    embedding_rows.push_back({{"clip_id", clip_id}, {"embedding", e}});
  }
  std::map<std::string, std::size_t> by_gender;
  std::map<int, std::size_t> by_bucket;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    Slot& slot = slots[i];
    for (auto& [clip_id, e] : slot.computed) {
      embedding_rows.push_back({{"clip_id", clip_id}, {"embedding", e}});
    }
    ordered_json row;
    row["recording_id"] = recordings[i];
    row["clips"] = premium.at(recordings[i]).size();
    if (!slot.error.empty()) {
      row["accepted"] = false;
      row["reason"] = "embed_error";
      rejected[recordings[i]] = AuditEntry{"embed_error", slot.error};
    } else {
      const auto& o = *slot.outcome;
      row["qualifying_pairs"] = o.qualifying_pairs;
      row["required_pairs"] = o.required;
      row["accepted"] = o.profile.has_value();
      if (o.profile) {
        row["gender"] = to_string(o.profile->gender);
        row["rate_bucket"] = o.profile->rate_bucket;
        ++by_gender[std::string(to_string(o.profile->gender))];
        ++by_bucket[o.profile->rate_bucket];
        profiles.push_back(*o.profile);
      } else {
        row["reason"] = o.reject_reason;
        rejected[recordings[i]] = AuditEntry{
            o.reject_reason, std::to_string(o.qualifying_pairs) + " of " +
                                 std::to_string(o.required) + " required pairs"};
      }
    }
    identify_rows.push_back(std::move(row));
  }
  std::sort(embedding_rows.begin(), embedding_rows.end(),
            [](const auto& a, const auto& b) { return a["clip_id"] < b["clip_id"]; });
  write_lines(layout_.embeddings(), embedding_rows);
  write_lines(layout_.identify(), identify_rows);
  audit_.replace_stage(Stage::kVoices, std::move(rejected));
  write_json(layout_.profiles(), voices::profiles_to_json(profiles));
  audit_.save();

  voices::LibraryOptions opts;
  opts.target_count = config_.voice_count;
  opts.seed = config_.seed;
  opts.lambda = config_.voice_lambda;
  const voices::VoiceLibrary library = voices::generate_voice_library(profiles, opts);
  write_json(layout_.library(), voices::library_to_json(library));

  std::size_t users_m = 0;
  for (const auto& v : library.users) users_m += v.gender == Gender::kMale ? 1 : 0;
  ordered_json report;
  report["clips"] = clips.size();
  report["recordings"] = all_recordings.size();
  report["premium_recordings"] = premium.size();
  report["profiles"] = profiles.size();
  report["profiles_by_gender"] = by_gender;
  ordered_json buckets = ordered_json::object();
  for (const auto& [b, n] : by_bucket) buckets[std::to_string(b)] = n;
  report["profiles_by_rate_bucket"] = std::move(buckets);
  report["voices"] = {{"users", library.users.size()},
                      {"male", users_m},
                      {"female", library.users.size() - users_m},
                      {"agents", library.agents.size()},
                      {"widened", library.widened}};
  return finish(Stage::kVoices, std::move(report),
                "voices: " + std::to_string(profiles.size()) + " real speakers, " +
                    std::to_string(library.users.size()) + " user voices + " +
                    std::to_string(library.agents.size()) + " agents");
}

// ---------------------------------------------------------------------------
// synth: voice assignment, TTS, watermarking and metadata.

StageReport Pipeline::run_synth(bool force) {
  require(layout_.text_dialogues(), "text dialogues");
  require(layout_.library(), "voice library");
  const voices::VoiceLibrary library = voices::library_from_json(read_json(layout_.library()));
  std::vector<synth::DialogueText> texts;
  for (const auto& row : read_lines(layout_.text_dialogues())) {
    texts.push_back({row.at("id").get<std::string>(),
                     parse_language(row.at("language").get<std::string>()),
                     row.at("instruction").get<std::string>(),
                     row.at("response").get<std::string>()});
  }
  const corpus::CorpusStore store(layout_.corpus());

  std::map<std::string, corpus::DialogueRecord> previous;
  if (!force && fs::exists(layout_.synth_metadata())) {
    for (auto& r : corpus::load_metadata(layout_.synth_metadata())) {
      const corpus::DialogueRecord one[] = {r};
      if (store.missing_audio(one).empty()) previous.emplace(r.id, std::move(r));
    }
  }

  struct Slot {
    std::optional<corpus::DialogueRecord> record;
    AuditEntry failure;
  };
  std::vector<Slot> slots(texts.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const std::string& id = texts[i].id;
    if (auto it = previous.find(id); it != previous.end()) {
      slots[i].record = it->second;
    } else if (const AuditEntry* e = audit_.find(Stage::kSynth, id);
               !force && e && !is_transient_reason(e->reason)) {
      slots[i].failure = *e;
    } else {
      pending.push_back(i);
    }
  }
  if (!pending.empty()) clients_->check_health();

  const synth::SpreadSpectrumWatermarker watermarker;
  synth::SynthOptions opts;
  opts.sample_rate = config_.sample_rate;
  opts.watermark.key = config_.watermark_key;
  opts.watermark.strength_db = config_.watermark_strength_db;
  std::atomic<std::size_t> done{0};
  parallel_for(pending.size(), config_.workers, [&](std::size_t k) {
    Slot& slot = slots[pending[k]];
    const synth::DialogueText& text = texts[pending[k]];
    try {
      const auto assignment = synth::assign_voices(text.id, library, config_.seed);
      auto d = synth::synthesize_dialogue(*clients_, watermarker, text, assignment, library, opts);
      const auto check = corpus::validate_record(d.record);
      if (!check.ok()) {
        slot.failure = {"invalid_record", check.violations.front().message};
      } else {
        for (std::size_t t = 0; t < d.turns.size(); ++t) {
          if (!watermarker.detect(d.turns[t], opts.watermark, config_.watermark_tau).detected) {
            slot.failure = {"watermark_undetected", "turn " + std::to_string(t)};
            break;
          }
        }
      }
      if (slot.failure.reason.empty()) {
        for (std::size_t t = 0; t < d.turns.size(); ++t) {
          wav::write(store.resolve(d.record.dialog[t]), d.turns[t]);
        }
        if (config_.stereo_session) {
          const auto [left, right] = synth::session_channels(d);
          write_file(layout_.corpus() / synth::session_audio_path(text.id),
                     wav::encode_stereo(left, right));
        }
        slot.record = std::move(d.record);
      }
    } catch (const backends::BackendError& e) {
      slot.failure = {"tts_error", e.what()};
    } catch (const PreconditionError& e) {
      slot.failure = {"invalid_dialogue", e.what()};
    }
    tick(Stage::kSynth, ++done, pending.size());
  });

  std::vector<corpus::DialogueRecord> records;
  std::map<std::string, AuditEntry> rejected;
  std::map<std::string, std::size_t> reasons;
  std::map<Language, double> seconds;
  std::map<std::string, std::size_t> agent_use;
  std::set<std::string> users_used;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (slots[i].record) {
      const auto& r = *slots[i].record;
      seconds[r.language()] += r.audio.duration;
      if (r.agent()) ++agent_use[r.agent()->id];
      if (r.user()) users_used.insert(r.user()->id);
      records.push_back(std::move(*slots[i].record));
    } else {
      ++reasons[slots[i].failure.reason];
      rejected[texts[i].id] = std::move(slots[i].failure);
    }
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  corpus::save_metadata(layout_.synth_metadata(), records);
  audit_.replace_stage(Stage::kSynth, std::move(rejected));

  ordered_json report;
  report["dialogues"] = texts.size();
  report["synthesized"] = records.size();
  report["failed"] = texts.size() - records.size();
  report["failure_reasons"] = reasons;
  report["seconds"] = language_map(seconds);
  report["user_voices_used"] = users_used.size();
  report["agent_use"] = agent_use;
  return finish(Stage::kSynth, std::move(report),
                "synth: " + std::to_string(records.size()) + " of " +
                    std::to_string(texts.size()) + " dialogues synthesized" +
                    processed_note(pending.size(), texts.size()));
}

// ---------------------------------------------------------------------------
// qa: ASR transcription and CER/WER gating.

StageReport Pipeline::run_qa(bool force) {
  require(layout_.synth_metadata(), "synth metadata");
  const std::vector<corpus::DialogueRecord> records = load_corpus(layout_.synth_metadata());
  const corpus::CorpusStore store(layout_.corpus());
  const qa::QaThresholds thresholds{config_.cer_threshold, config_.wer_threshold};

  std::map<std::string, ordered_json> previous;
  if (!force) {
    for (auto& row : read_lines(layout_.decisions())) {
      const bool final = row.at("verdict") == "keep" ||
                         !is_transient_reason(row.value("reason", std::string()));
      // A changed threshold invalidates earlier verdicts.
      if (final && row.at("threshold").get<double>() ==
                       thresholds.for_language(parse_language(row.at("language").get<std::string>()))) {
        previous.emplace(row.at("id").get<std::string>(), std::move(row));
      }
    }
  }
  std::vector<ordered_json> rows(records.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto it = previous.find(records[i].id); it != previous.end()) {
      rows[i] = it->second;
    } else {
      pending.push_back(i);
    }
  }
  if (!pending.empty()) clients_->check_health();

  std::atomic<std::size_t> done{0};
  parallel_for(pending.size(), config_.workers, [&](std::size_t k) {
    const auto& r = records[pending[k]];
    qa::QaDecision d;
    try {
      const auto audio = load_turns(store, r);
      d = qa::qa_filter(*clients_, r, audio, thresholds);
    } catch (const MissingInputError& e) {
      d.dialogue_id = r.id;
      d.language = r.language();
      d.threshold = thresholds.for_language(d.language);
      d.drop_reason = "audio_missing";
      d.detail = e.artifact();
    }
    rows[pending[k]] = qa::decision_to_json(d);
    tick(Stage::kQa, ++done, pending.size());
  });

  std::vector<corpus::DialogueRecord> kept;
  std::map<std::string, AuditEntry> rejected;
  std::map<std::string, std::size_t> reasons;
  struct LangAgg {
    std::size_t total = 0, kept = 0, edits = 0, ref_len = 0;
  };
  std::map<Language, LangAgg> langs;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& row = rows[i];
    LangAgg& agg = langs[records[i].language()];
    ++agg.total;
    for (const auto& t : row.at("turns")) {
      agg.edits += t.at("substitutions").get<std::size_t>() + t.at("deletions").get<std::size_t>() +
                   t.at("insertions").get<std::size_t>();
      agg.ref_len += t.at("ref_len").get<std::size_t>();
    }
    if (row.at("verdict") == "keep") {
      ++agg.kept;
      kept.push_back(records[i]);
    } else {
      const std::string reason = row.at("reason").get<std::string>();
      ++reasons[reason];
      rejected[records[i].id] = AuditEntry{
          reason, row.contains("detail") ? row["detail"].get<std::string>()
                                         : "rate " + qa::format_fixed(row.at("rate").get<double>(), 4)};
    }
  }
  write_lines(layout_.decisions(), rows);
  corpus::CorpusStore(layout_.corpus()).save(kept);
  audit_.replace_stage(Stage::kQa, std::move(rejected));

  ordered_json report;
  report["total"] = records.size();
  report["kept"] = kept.size();
  report["dropped"] = records.size() - kept.size();
  report["acceptance"] = ratio(kept.size(), records.size());
  report["thresholds"] = {{"zh_cer", thresholds.zh}, {"en_wer", thresholds.en}};
  ordered_json lj = ordered_json::object();
  for (Language l : {Language::kZh, Language::kEn}) {
    const LangAgg& a = langs[l];
    lj[std::string(to_string(l))] = {{"metric", l == Language::kZh ? "cer" : "wer"},
                                     {"total", a.total},
                                     {"kept", a.kept},
                                     {"acceptance", ratio(a.kept, a.total)},
                                     {"pooled_rate", ratio(a.edits, a.ref_len)}};
  }
  report["languages"] = std::move(lj);
  report["drop_reasons"] = reasons;
  return finish(Stage::kQa, std::move(report),
                "qa: kept " + std::to_string(kept.size()) + " of " +
                    std::to_string(records.size()) + " dialogues" +
                    processed_note(pending.size(), records.size()));
}

// ---------------------------------------------------------------------------
// partition: holdout, nested subsets and derived training manifests.

StageReport Pipeline::run_partition() {
  const std::vector<corpus::DialogueRecord> all = load_corpus(layout_.corpus_metadata());
  const ops::HoldoutSplit holdout = ops::holdout_split(
      all, config_.holdout_dev_per_gender, config_.holdout_test_per_gender, config_.seed);
  const std::set<std::string> train_ids(holdout.train.begin(), holdout.train.end());
  std::vector<corpus::DialogueRecord> train;
  for (const auto& r : all) {
    if (train_ids.count(r.id)) train.push_back(r);
  }

  std::vector<std::string> roster;
  if (config_.require_library_coverage) {
    require(layout_.library(), "voice library");
    const auto library = voices::library_from_json(read_json(layout_.library()));
    for (const auto& v : library.agents) roster.push_back(v.speaker_id);
    for (const auto& v : library.users) {
      if (!holdout.dev_speakers.count(v.speaker_id) && !holdout.test_speakers.count(v.speaker_id)) {
        roster.push_back(v.speaker_id);
      }
    }
  }
  ops::PartitionSpec spec = ops::PartitionSpec::defaults(config_.seed).only(config_.subsets);
  spec.scale = config_.partition_scale;
  const ops::PartitionResult result =
      ops::partition(train, spec, config_.require_library_coverage ? &roster : nullptr);

  std::map<std::string, const corpus::DialogueRecord*> by_id;
  for (const auto& r : train) by_id[r.id] = &r;
  std::set<std::string> corpus_speakers;
  for (const auto& r : train) {
    for (const auto& s : r.speakers) corpus_speakers.insert(s.id);
  }

  ordered_json subsets = ordered_json::array();
  bool nested = true;
  bool covered = true;
  std::set<std::string> prev_ids;
  for (const auto& s : result.subsets) {
    std::string ids_text;
    for (const auto& id : s.ids) ids_text += id + "\n";
    write_file(layout_.subset_ids(s.name), ids_text);
    std::set<std::string> ids(s.ids.begin(), s.ids.end());
    std::vector<corpus::DialogueRecord> recs;
    std::set<std::string> speakers;
    for (const auto& id : ids) {
      recs.push_back(*by_id.at(id));
      for (const auto& sp : recs.back().speakers) speakers.insert(sp.id);
    }
    // Each subset is a corpus of its own: dialogue directories link back
    // to the kept audio, so turn paths resolve without copying.
    const fs::path subset_dir = layout_.subset_metadata(s.name).parent_path();
    fs::remove_all(subset_dir);
    fs::create_directories(subset_dir);
    for (const auto& id : ids) {
      fs::create_directory_symlink(fs::path("..") / ".." / "corpus" / id, subset_dir / id);
    }
    corpus::save_metadata(layout_.subset_metadata(s.name), recs);
    nested = nested && std::includes(ids.begin(), ids.end(), prev_ids.begin(), prev_ids.end());
    covered = covered && speakers == corpus_speakers;
    prev_ids = std::move(ids);
    std::map<Language, double> target_h, hours;
    for (const auto& [l, v] : s.target_seconds) target_h[l] = v / 3600.0;
    for (const auto& [l, v] : s.seconds) hours[l] = v / 3600.0;
    subsets.push_back({{"name", s.name},
                       {"dialogues", s.ids.size()},
                       {"speakers", speakers.size()},
                       {"target_hours", language_map(target_h)},
                       {"hours", language_map(hours)}});
  }

  ordered_json hj;
  hj["train"] = holdout.train;
  hj["dev"] = holdout.dev;
  hj["test"] = holdout.test;
  hj["dev_speakers"] = holdout.dev_speakers;
  hj["test_speakers"] = holdout.test_speakers;
  write_json(layout_.holdout(), hj);

  ordered_json report;
  report["corpus_dialogues"] = all.size();
  report["train_dialogues"] = train.size();
  report["holdout"] = {{"dev_dialogues", holdout.dev.size()},
                       {"test_dialogues", holdout.test.size()},
                       {"dev_speakers", holdout.dev_speakers.size()},
                       {"test_speakers", holdout.test_speakers.size()}};
  report["scale"] = config_.partition_scale;
  report["subsets"] = std::move(subsets);
  report["nested"] = nested;
  report["speaker_coverage"] = covered;

  if (!config_.asr_subset.empty()) {
    auto it = std::find_if(result.subsets.begin(), result.subsets.end(),
                           [&](const auto& s) { return s.name == config_.asr_subset; });
    if (it == result.subsets.end()) {
      throw PreconditionError("asr subset '" + config_.asr_subset + "' is not partitioned");
    }
    const std::set<std::string> ids(it->ids.begin(), it->ids.end());
    const auto asr = ops::derive_asr_dataset(train, ids);
    std::vector<ordered_json> rows;
    for (const auto& u : asr) rows.push_back(ops::utterance_to_json(u, false));
    write_lines(layout_.asr_manifest(), rows);
    report["asr_dataset"] = {{"subset", config_.asr_subset}, {"utterances", asr.size()}};
  }
  const auto tts = ops::derive_tts_dataset(train, config_.tts_per_speaker, config_.seed);
  std::vector<ordered_json> rows;
  for (const auto& u : tts.utterances) rows.push_back(ops::utterance_to_json(u, true));
  write_lines(layout_.tts_manifest(), rows);
  report["tts_dataset"] = {{"per_speaker", config_.tts_per_speaker},
                           {"utterances", tts.utterances.size()},
                           {"under_sampled", tts.under_sampled.size()}};

  std::string summary = "partition:";
  for (const auto& s : result.subsets) {
    summary += " " + s.name + "=" + std::to_string(s.ids.size());
  }
  return finish(Stage::kPartition, std::move(report), summary);
}

// ---------------------------------------------------------------------------
// stats: corpus statistics and the combined pipeline report.

StageReport Pipeline::run_stats() {
  const std::vector<corpus::DialogueRecord> all = load_corpus(layout_.corpus_metadata());
  const ops::CorpusStats stats = ops::compute_stats(all);
  ordered_json sj;
  sj["corpus"] = stats.to_json();
  ordered_json subsets = ordered_json::object();
  for (const auto& name : config_.subsets) {
    const fs::path p = layout_.subset_metadata(name);
    if (fs::exists(p)) subsets[name] = ops::compute_stats(corpus::load_metadata(p)).to_json();
  }
  sj["subsets"] = std::move(subsets);
  write_json(layout_.stats_json(), sj);
  write_file(layout_.stats_table(), stats.render_table());

  ordered_json combined;
  ordered_json stages = ordered_json::object();
  for (Stage s : {Stage::kText, Stage::kVoices, Stage::kSynth, Stage::kQa, Stage::kPartition}) {
    if (fs::exists(layout_.report(s))) stages[std::string(to_string(s))] = read_json(layout_.report(s));
  }
  combined["stages"] = std::move(stages);
  combined["stats"] = stats.to_json();
  ordered_json audit = ordered_json::object();
  for (Stage s : all_stages()) audit[std::string(to_string(s))] = audit_.count(s);
  combined["rejections"] = std::move(audit);
  write_json(layout_.pipeline_report(), combined);

  const auto& zh = stats.languages.at(Language::kZh);
  const auto& en = stats.languages.at(Language::kEn);
  return finish(Stage::kStats, sj,
                "stats: " + std::to_string(zh.dialogues) + " zh + " +
                    std::to_string(en.dialogues) + " en dialogues, " +
                    std::to_string(stats.total_speakers) + " speakers");
}

// ---------------------------------------------------------------------------
// eval: speech quality, instruction following and modality alignment.

StageReport Pipeline::run_eval() {
  const std::vector<corpus::DialogueRecord> all = load_corpus(layout_.corpus_metadata());
  const corpus::CorpusStore store(layout_.corpus());
  std::map<std::string, const corpus::DialogueRecord*> by_id;
  for (const auto& r : all) by_id[r.id] = &r;

  struct Item {
    const corpus::DialogueRecord* record = nullptr;
    std::string response;
    fs::path response_audio;  // empty: the agent turn
  };
  std::vector<Item> items;
  std::string source;
  if (!config_.responses.empty()) {
    require(config_.responses, "responses");
    source = "responses";
    const fs::path base = config_.responses.parent_path();
    for (const auto& row : read_lines(config_.responses)) {
      const std::string id = row.at("id").get<std::string>();
      auto it = by_id.find(id);
      if (it == by_id.end()) throw PreconditionError("response for unknown dialogue '" + id + "'");
      Item item{it->second, row.at("response").get<std::string>(), {}};
      if (row.contains("audio_path")) item.response_audio = base / row["audio_path"].get<std::string>();
      items.push_back(std::move(item));
    }
  } else {
    source = config_.mos_subset;
    for (const auto& id : read_ids(layout_.subset_ids(config_.mos_subset))) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw PreconditionError("subset id '" + id + "' not in corpus");
      const auto* agent = it->second->agent();
      std::string response;
      for (const auto& t : it->second->dialog) {
        if (agent && t.speaker == agent->id) response = t.text;
      }
      items.push_back({it->second, response, {}});
    }
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.record->id < b.record->id; });
  }
  if (items.empty()) throw PreconditionError("eval set is empty");
  clients_->check_health();
  const text::PromptSet prompts = load_prompts(config_);

  struct Slot {
    std::vector<double> dnsmos, utmos;
    std::optional<qa::S2tifScore> s2tif;
    std::string error;
    qa::ErrorRateReport alignment;
  };
  std::vector<Slot> slots(items.size());
  std::atomic<std::size_t> done{0};
  parallel_for(items.size(), config_.workers, [&](std::size_t i) {
    Slot& slot = slots[i];
    const auto& r = *items[i].record;
    const auto audio = load_turns(store, r);
    std::size_t user_turn = 0, agent_turn = audio.size() - 1;
    for (std::size_t t = 0; t < r.dialog.size(); ++t) {
      if (r.user() && r.dialog[t].speaker == r.user()->id) user_turn = t;
      if (r.agent() && r.dialog[t].speaker == r.agent()->id) agent_turn = t;
    }
    for (const auto& w : audio) {
      slot.dnsmos.push_back(clients_->score_mos(w, backends::MosMetric::kDnsmos));
      slot.utmos.push_back(clients_->score_mos(w, backends::MosMetric::kUtmos));
    }
    const Waveform response_audio =
        items[i].response_audio.empty() ? audio[agent_turn] : wav::read(items[i].response_audio);
    try {
      const std::string transcript = clients_->transcribe(audio[user_turn], r.language());
      slot.s2tif = qa::s2tif_judge(*clients_, prompts, transcript, items[i].response, r.language());
    } catch (const ParseError& e) {
      slot.error = e.what();
    }
    slot.alignment = qa::modality_alignment(*clients_, items[i].response, response_audio, r.language());
    tick(Stage::kEval, ++done, items.size());
  });

  std::vector<double> dnsmos, utmos, content, style;
  std::map<Language, std::vector<double>> lengths;
  std::map<Language, qa::ErrorRateReport> alignment;
  std::vector<ordered_json> rows;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Slot& s = slots[i];
    const Language lang = items[i].record->language();
    dnsmos.insert(dnsmos.end(), s.dnsmos.begin(), s.dnsmos.end());
    utmos.insert(utmos.end(), s.utmos.begin(), s.utmos.end());
    alignment[lang] += s.alignment;
    ordered_json row;
    row["id"] = items[i].record->id;
    row["language"] = to_string(lang);
    if (s.s2tif) {
      content.push_back(s.s2tif->content);
      style.push_back(s.s2tif->style);
      lengths[lang].push_back(static_cast<double>(s.s2tif->response_length));
      row["content"] = s.s2tif->content;
      row["style"] = s.s2tif->style;
      row["response_length"] = s.s2tif->response_length;
      row["length_unit"] = lang == Language::kZh ? "characters" : "words";
    } else {
      ++errors;
      row["error"] = s.error;
    }
    row["alignment_rate"] = s.alignment.ref_len ? s.alignment.rate() : 0.0;
    rows.push_back(std::move(row));
  }
  write_lines(layout_.s2tif(), rows);

  ordered_json report;
  report["source"] = source;
  report["dialogues"] = items.size();
  const auto dn = qa::summarize_scores(dnsmos);
  const auto ut = qa::summarize_scores(utmos);
  report["speech_quality"] = {{"dnsmos", summary_json(dn)}, {"utmos", summary_json(ut)}};
  ordered_json s2 = {{"scored", content.size()}, {"errors", errors}};
  std::string summary_text = "speech quality (" + source + ")\n  DNSMOS  " + dn.render() +
                             "\n  UTMOS   " + ut.render() + "\n";
  if (!content.empty()) {
    const auto c = qa::summarize_scores(content);
    const auto st = qa::summarize_scores(style);
    s2["content"] = summary_json(c);
    s2["style"] = summary_json(st);
    summary_text += "instruction following\n  content " + qa::format_fixed(c.mean) +
                    "\n  style   " + qa::format_fixed(st.mean) + "\n";
    ordered_json len = ordered_json::object();
    for (const auto& [l, v] : lengths) {
      const auto m = qa::summarize_scores(v);
      len[std::string(to_string(l))] = {{"mean", m.mean},
                                        {"unit", l == Language::kZh ? "characters" : "words"}};
      summary_text += "  length " + std::string(to_string(l)) + " " + qa::format_fixed(m.mean) +
                      (l == Language::kZh ? " characters\n" : " words\n");
    }
    s2["length"] = std::move(len);
  }
  report["s2tif"] = std::move(s2);
  ordered_json al = ordered_json::object();
  summary_text += "modality alignment\n";
  for (const auto& [l, a] : alignment) {
    const double rate = a.ref_len ? a.rate() : 0.0;
    al[std::string(to_string(l))] = {{"metric", l == Language::kZh ? "cer" : "wer"},
                                      {"rate", rate},
                                      {"ref_len", a.ref_len}};
    summary_text += "  " + std::string(l == Language::kZh ? "CER zh " : "WER en ") +
                    qa::format_fixed(100.0 * rate) + "%\n";
  }
  report["modality_alignment"] = std::move(al);
  write_file(layout_.eval_summary(), summary_text);
  return finish(Stage::kEval, std::move(report),
                "eval: " + std::to_string(items.size()) + " dialogues, DNSMOS " + dn.render() +
                    ", UTMOS " + ut.render());
}

// ---------------------------------------------------------------------------

ordered_json validate_corpus(const fs::path& metadata_path, bool check_audio) {
  ordered_json out;
  out["path"] = metadata_path.filename().string();
  std::vector<corpus::DialogueRecord> records;
  try {
    records = corpus::decode_metadata(read_file(metadata_path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse && e.code() != ErrorCode::kValidation) throw;
    out["valid"] = false;
    out["error"] = e.what();
    return out;
  }
  ordered_json problems = ordered_json::array();
  for (const auto& r : records) {
    for (const auto& v : corpus::validate_record(r).violations) {
      problems.push_back({{"id", r.id}, {"code", v.code}, {"field", v.field}});
    }
  }
  std::vector<std::string> missing;
  if (check_audio) {
    missing = corpus::CorpusStore(metadata_path.parent_path()).missing_audio(records);
  }
  out["dialogues"] = records.size();
  out["violations"] = std::move(problems);
  out["missing_audio"] = missing;
  out["valid"] = out["violations"].empty() && missing.empty();
  return out;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingInput: return 2;
    case ErrorCode::kBackendUnreachable: return 3;
    default: return 1;
  }
}

}  // namespace dialogsynth::pipeline
