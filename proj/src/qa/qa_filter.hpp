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

#include <span>
#include <string>
#include <vector>

#include "backends/client.hpp"
#include "corpus/types.hpp"
#include "json.hpp"
#include "qa/edit_distance.hpp"
#include "synth/waveform.hpp"

namespace dialogsynth::qa {

struct QaThresholds {
  double zh = 0.05;  // CER
  double en = 0.10;  // WER
  double for_language(Language l) const { return l == Language::kZh ? zh : en; }
};

struct TurnQa {
  std::size_t turn = 0;
  std::string hypothesis;
  ErrorRateReport report;
};

struct QaDecision {
  std::string dialogue_id;
  Language language = Language::kEn;
  std::vector<TurnQa> turns;
  ErrorRateReport total;  // pooled over turns
  double rate = 0.0;
  double threshold = 0.0;
  bool keep = false;
  // "error_rate", "asr_error" or "empty_reference" when dropped.
  std::string drop_reason;
  std::string detail;
};

// Transcribes every turn, pools edits over turns and keeps the dialogue
// iff the pooled rate does not exceed the language threshold. ASR failures
// drop the dialogue with reason asr_error.
QaDecision qa_filter(backends::ModelClients& clients, const corpus::DialogueRecord& dialogue,
                     std::span<const Waveform> audio, const QaThresholds& thresholds = {});

// Edits of one transcript against its reference text; an empty normalized
// reference yields ref_len 0 rather than an error.
ErrorRateReport score_transcript(std::string_view reference, std::string_view hypothesis,
                                 Language language);

nlohmann::ordered_json decision_to_json(const QaDecision& d);

}  // namespace dialogsynth::qa
