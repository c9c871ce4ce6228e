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

#include "pipeline/config.hpp"

#include <cstdlib>
#include <set>

#include "util/error.hpp"
#include "util/io.hpp"

namespace dialogsynth::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw PreconditionError("config '" + where + "' must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) {
      throw PreconditionError("config '" + where + "' has unknown key '" + k + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw PreconditionError("config '" + where + "." + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

const json& section(const json& j, const char* key) {
  static const json kEmpty = json::object();
  auto it = j.find(key);
  return it == j.end() ? kEmpty : *it;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw PreconditionError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw PreconditionError("override key '" + key + "' has an empty part");
    if (!node->is_object()) throw PreconditionError("override key '" + key + "' crosses a value");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

PipelineConfig parse_config(json j, const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides) {
  if (!j.is_object()) throw PreconditionError("config must be a JSON object");
  for (const auto& o : overrides) apply_override(j, o);

  // Environment overrides for endpoint addresses and tokens.
  for (const char* kind : {"chat", "tts", "asr", "asr_zh", "embed", "mos"}) {
    const std::string prefix = "DIALOGSYNTH_" + upper(kind);
    if (const char* addr = std::getenv((prefix + "_ADDRESS").c_str()); addr && *addr) {
      j["backends"][kind]["address"] = addr;
    }
    if (const char* token = std::getenv((prefix + "_TOKEN").c_str()); token && *token) {
      j["backends"][kind]["bearer_token"] = token;
    }
  }

  check_keys(j, "config",
             {"seed", "output_root", "inputs", "backends", "mock", "chat", "thresholds",
              "voices", "watermark", "partition", "holdout", "derive", "eval", "workers",
              "sample_rate", "stereo_session", "directives"});
  PipelineConfig c;
  const auto non_negative = [](const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  };
  if (!j.contains("seed") || !non_negative(j["seed"])) {
    throw PreconditionError("config 'seed' is required and must be a non-negative integer");
  }
  c.seed = j["seed"].get<std::uint64_t>();
  std::string output_root = "out";
  read(j, "output_root", output_root, "config");
  c.output_root = resolve(base_dir, output_root);
  read(j, "workers", c.workers, "config");
  read(j, "sample_rate", c.sample_rate, "config");
  read(j, "stereo_session", c.stereo_session, "config");
  if (j.contains("directives")) {
    std::vector<std::string> d;
    read(j, "directives", d, "config");
    c.directive_patterns = std::move(d);
  }

  const json& inputs = section(j, "inputs");
  check_keys(inputs, "inputs", {"instructions", "clips", "responses", "prompts_dir", "prompts"});
  std::string s;
  s.clear(); read(inputs, "instructions", s, "inputs"); c.instructions = resolve(base_dir, s);
  s.clear(); read(inputs, "clips", s, "inputs"); c.clips = resolve(base_dir, s);
  s.clear(); read(inputs, "responses", s, "inputs"); c.responses = resolve(base_dir, s);
  s.clear(); read(inputs, "prompts_dir", s, "inputs"); c.prompts_dir = resolve(base_dir, s);
  if (inputs.contains("prompts")) {
    std::map<std::string, std::string> files;
    read(inputs, "prompts", files, "inputs");
    for (const auto& [name, p] : files) c.prompt_files[name] = resolve(base_dir, p);
  }

  const json& be = section(j, "backends");
  check_keys(be, "backends", {"chat", "tts", "asr", "asr_zh", "embed", "mos"});
  for (const auto& [kind, spec] : be.items()) {
    const std::string where = "backends." + kind;
    check_keys(spec, where,
               {"mode", "address", "timeout_seconds", "max_in_flight", "bearer_token"});
    backends::BackendEndpoint e;
    e.kind = backends::parse_kind(kind);
    std::string mode = "builtin-mock";
    read(spec, "mode", mode, where);
    e.mode = backends::parse_mode(mode);
    read(spec, "address", e.address, where);
    read(spec, "timeout_seconds", e.timeout_seconds, where);
    read(spec, "max_in_flight", e.max_in_flight, where);
    read(spec, "bearer_token", e.bearer_token, where);
    c.endpoints.push_back(std::move(e));
  }

  const json& mock = section(j, "mock");
  check_keys(mock, "mock", {"seed", "char_error_rate", "embedding_dim", "chat_script"});
  c.mock.seed = c.seed;
  read(mock, "seed", c.mock.seed, "mock");
  read(mock, "char_error_rate", c.mock.char_error_rate, "mock");
  read(mock, "embedding_dim", c.mock.embedding_dim, "mock");
  read(mock, "chat_script", c.mock.chat_script, "mock");

  const json& chat = section(j, "chat");
  check_keys(chat, "chat", {"temperature", "max_tokens"});
  read(chat, "temperature", c.chat_temperature, "chat");
  read(chat, "max_tokens", c.chat_max_tokens, "chat");

  const json& th = section(j, "thresholds");
  check_keys(th, "thresholds",
             {"similarity", "dnsmos_min", "min_clips", "cer_zh", "wer_en", "watermark_tau"});
  read(th, "similarity", c.similarity_threshold, "thresholds");
  read(th, "dnsmos_min", c.dnsmos_min, "thresholds");
  read(th, "min_clips", c.min_clips, "thresholds");
  read(th, "cer_zh", c.cer_threshold, "thresholds");
  read(th, "wer_en", c.wer_threshold, "thresholds");
  read(th, "watermark_tau", c.watermark_tau, "thresholds");

  const json& voices = section(j, "voices");
  check_keys(voices, "voices", {"target_count", "lambda"});
  read(voices, "target_count", c.voice_count, "voices");
  read(voices, "lambda", c.voice_lambda, "voices");

  const json& wm = section(j, "watermark");
  check_keys(wm, "watermark", {"key", "strength_db"});
  c.watermark_key = c.seed;
  read(wm, "key", c.watermark_key, "watermark");
  read(wm, "strength_db", c.watermark_strength_db, "watermark");

  const json& part = section(j, "partition");
  check_keys(part, "partition", {"subsets", "scale", "require_library_coverage"});
  read(part, "subsets", c.subsets, "partition");
  read(part, "scale", c.partition_scale, "partition");
  read(part, "require_library_coverage", c.require_library_coverage, "partition");

  const json& hold = section(j, "holdout");
  check_keys(hold, "holdout", {"dev_per_gender", "test_per_gender"});
  read(hold, "dev_per_gender", c.holdout_dev_per_gender, "holdout");
  read(hold, "test_per_gender", c.holdout_test_per_gender, "holdout");

  const json& derive = section(j, "derive");
  check_keys(derive, "derive", {"asr_subset", "tts_per_speaker"});
  read(derive, "asr_subset", c.asr_subset, "derive");
  read(derive, "tts_per_speaker", c.tts_per_speaker, "derive");

  const json& ev = section(j, "eval");
  check_keys(ev, "eval", {"mos_subset"});
  read(ev, "mos_subset", c.mos_subset, "eval");

  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides) {
  if (!std::filesystem::exists(path)) throw MissingInputError(path.string());
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  return parse_config(std::move(j), path.parent_path(), overrides);
}

void validate(const PipelineConfig& c) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(c.similarity_threshold)) throw PreconditionError("similarity outside [0, 1]");
  if (!(c.dnsmos_min >= 1.0 && c.dnsmos_min <= 5.0)) {
    throw PreconditionError("dnsmos_min outside [1, 5]");
  }
  if (c.min_clips < 1) throw PreconditionError("min_clips must be >= 1");
  if (!in_unit(c.cer_threshold) || !in_unit(c.wer_threshold)) {
    throw PreconditionError("error-rate thresholds outside [0, 1]");
  }
  if (!(c.watermark_tau > 0.0 && c.watermark_tau < 1.0)) {
    throw PreconditionError("watermark_tau outside (0, 1)");
  }
  if (!(c.watermark_strength_db < 0.0)) throw PreconditionError("watermark strength_db must be < 0");
  if (!in_unit(c.mock.char_error_rate)) throw PreconditionError("char_error_rate outside [0, 1]");
  if (c.mock.embedding_dim < 1) throw PreconditionError("embedding_dim must be >= 1");
  if (!(c.voice_lambda > 0.0 && c.voice_lambda < 1.0)) {
    throw PreconditionError("voices.lambda outside (0, 1)");
  }
  if (!(c.partition_scale > 0.0)) throw PreconditionError("partition.scale must be > 0");
  if (c.workers < 1) throw PreconditionError("workers must be >= 1");
  if (c.sample_rate <= 0) throw PreconditionError("sample_rate must be > 0");
  if (c.output_root.empty()) throw PreconditionError("output_root is empty");
  std::set<backends::BackendKind> kinds;
  for (const auto& e : c.endpoints) {
    backends::validate(e);
    if (!kinds.insert(e.kind).second) throw PreconditionError("duplicate backend kind");
  }
}

ordered_json config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["output_root"] = c.output_root.string();
  j["inputs"] = {{"instructions", c.instructions.string()},
                 {"clips", c.clips.string()},
                 {"responses", c.responses.string()},
                 {"prompts_dir", c.prompts_dir.string()}};
  ordered_json be = ordered_json::object();
  for (const auto& e : c.endpoints) {
    be[std::string(backends::to_string(e.kind))] = {
        {"mode", backends::to_string(e.mode)},
        {"address", e.address},
        {"timeout_seconds", e.timeout_seconds},
        {"max_in_flight", e.max_in_flight},
        {"bearer_token", e.bearer_token.empty() ? "" : "<set>"}};
  }
  j["backends"] = std::move(be);
  j["mock"] = {{"seed", c.mock.seed},
               {"char_error_rate", c.mock.char_error_rate},
               {"embedding_dim", c.mock.embedding_dim}};
  j["thresholds"] = {{"similarity", c.similarity_threshold},
                     {"dnsmos_min", c.dnsmos_min},
                     {"min_clips", c.min_clips},
                     {"cer_zh", c.cer_threshold},
                     {"wer_en", c.wer_threshold},
                     {"watermark_tau", c.watermark_tau}};
  j["voices"] = {{"target_count", c.voice_count}, {"lambda", c.voice_lambda}};
  j["watermark"] = {{"key", c.watermark_key}, {"strength_db", c.watermark_strength_db}};
  j["partition"] = {{"subsets", c.subsets},
                    {"scale", c.partition_scale},
                    {"require_library_coverage", c.require_library_coverage}};
  j["holdout"] = {{"dev_per_gender", c.holdout_dev_per_gender},
                  {"test_per_gender", c.holdout_test_per_gender}};
  j["derive"] = {{"asr_subset", c.asr_subset}, {"tts_per_speaker", c.tts_per_speaker}};
  j["eval"] = {{"mos_subset", c.mos_subset}};
  j["workers"] = c.workers;
  j["sample_rate"] = c.sample_rate;
  j["stereo_session"] = c.stereo_session;
  return j;
}

}  // namespace dialogsynth::pipeline
