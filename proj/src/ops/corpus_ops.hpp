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

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "corpus/types.hpp"
#include "json.hpp"

namespace dialogsynth::ops {

struct HoldoutSplit {
  std::vector<std::string> train;  // dialogue ids, corpus order
  std::vector<std::string> dev;
  std::vector<std::string> test;
  std::set<std::string> dev_speakers;  // held-out user speakers
  std::set<std::string> test_speakers;
};

// Picks dev_per_gender + test_per_gender user speakers of each gender
// (seeded) and routes their dialogues to dev or test. Agents stay shared.
// Throws PreconditionError when a gender has too few user speakers.
HoldoutSplit holdout_split(std::span<const corpus::DialogueRecord> corpus,
                           std::size_t dev_per_gender, std::size_t test_per_gender,
                           std::uint64_t seed);

struct LanguageStats {
  std::size_t dialogues = 0;
  std::size_t min_words = 0;
  std::size_t max_words = 0;
  double mean_words = 0.0;
  double hours = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
  double mean_seconds = 0.0;
};

struct CorpusStats {
  std::map<Language, LanguageStats> languages;  // always holds zh and en
  // Distinct speakers keyed by role then gender.
  std::map<Role, std::map<Gender, std::size_t>> speakers;
  std::size_t total_speakers = 0;

  nlohmann::ordered_json to_json() const;
  // Rows in the order of the published statistics table.
  std::string render_table() const;
};

// Words are counted with the QA tokenizer over all turns.
CorpusStats compute_stats(std::span<const corpus::DialogueRecord> corpus);

struct Utterance {
  std::string dialogue_id;
  std::string speaker;
  Language language = Language::kEn;
  std::string audio_path;
  std::string text;  // normalized, tokens joined by spaces
  double duration = 0.0;
  bool under_sampled = false;  // only for TTS manifests
};

nlohmann::ordered_json utterance_to_json(const Utterance& u, bool with_flag);

// User turns of the dialogues in `subset` (all dialogues if empty).
std::vector<Utterance> derive_asr_dataset(std::span<const corpus::DialogueRecord> corpus,
                                          const std::set<std::string>& subset = {});

struct TtsDataset {
  std::vector<Utterance> utterances;
  // (speaker, language) -> available count, for speakers below per_speaker.
  std::map<std::pair<std::string, Language>, std::size_t> under_sampled;
};

// For every speaker and each language they speak, per_speaker turns drawn
// without replacement (seeded); speakers with fewer give all and are
// flagged.
TtsDataset derive_tts_dataset(std::span<const corpus::DialogueRecord> corpus,
                              std::size_t per_speaker, std::uint64_t seed);

}  // namespace dialogsynth::ops
