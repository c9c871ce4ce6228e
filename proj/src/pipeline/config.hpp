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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "backends/types.hpp"
#include "json.hpp"

namespace dialogsynth::pipeline {

// Everything a run depends on. Loaded from one JSON file; see
// config_schema_doc() for the accepted keys.
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_root;
  std::filesystem::path instructions;  // text stage input
  std::filesystem::path clips;         // voices stage input
  std::filesystem::path responses;     // optional eval input
  std::filesystem::path prompts_dir;   // empty: built-in templates
  std::map<std::string, std::filesystem::path> prompt_files;  // per-template overrides
  std::optional<std::vector<std::string>> directive_patterns;

  std::vector<backends::BackendEndpoint> endpoints;  // kinds not listed use mocks
  backends::MockConfig mock;
  double chat_temperature = 0.7;
  int chat_max_tokens = 512;

  double similarity_threshold = 0.97;
  double dnsmos_min = 4.0;
  std::size_t min_clips = 10;
  double cer_threshold = 0.05;
  double wer_threshold = 0.10;
  double watermark_tau = 0.05;

  std::size_t voice_count = 40;
  double voice_lambda = 0.5;
  std::uint64_t watermark_key = 0;
  double watermark_strength_db = -30.0;

  std::vector<std::string> subsets{"XS", "S", "M", "L", "XL"};
  double partition_scale = 1.0;
  bool require_library_coverage = false;
  std::size_t holdout_dev_per_gender = 0;
  std::size_t holdout_test_per_gender = 0;
  std::string asr_subset = "S";
  std::size_t tts_per_speaker = 10;
  std::string mos_subset = "XS";

  std::size_t workers = 4;
  int sample_rate = 22050;
  bool stereo_session = false;
};

// Applies `key.path=value` overrides (value parsed as JSON when possible,
// else taken as a string) and DIALOGSYNTH_<KIND>_ADDRESS / _TOKEN
// environment variables, then validates. Relative paths resolve against
// the config file's directory. Throws MissingInputError if the file is
// absent and PreconditionError for invalid content.
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});
PipelineConfig parse_config(nlohmann::json j, const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides = {});

void apply_override(nlohmann::json& j, const std::string& assignment);
void validate(const PipelineConfig& c);

nlohmann::ordered_json config_to_json(const PipelineConfig& c);

}  // namespace dialogsynth::pipeline
