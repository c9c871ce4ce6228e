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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "backends/client.hpp"
#include "qa/edit_distance.hpp"
#include "text/prompts.hpp"

namespace dialogsynth::qa {

struct S2tifScore {
  int content = 0;
  int style = 0;
  std::size_t response_length = 0;  // words (en) or characters (zh)
  bool operator==(const S2tifScore&) const = default;
};

// Accepts {"content": n, "style": n} anywhere in the reply with integer
// scores in [1, 5]; anything else throws ParseError.
S2tifScore parse_s2tif(std::string_view reply);

S2tifScore s2tif_judge(backends::ModelClients& clients, const text::PromptSet& prompts,
                       std::string_view instruction_transcript, std::string_view response_text,
                       Language language);

// Transcribes the response audio and scores it against the response text.
ErrorRateReport modality_alignment(backends::ModelClients& clients,
                                   std::string_view response_text,
                                   const Waveform& response_audio, Language language);

struct QualitySummary {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;
  // "m ± s" with two decimals.
  std::string render() const;
};

// Throws PreconditionError on an empty sample.
QualitySummary summarize_scores(std::span<const double> scores);
QualitySummary aggregate_quality(backends::ModelClients& clients,
                                 std::span<const Waveform> sample, backends::MosMetric metric);

std::string format_fixed(double value, int decimals = 2);

}  // namespace dialogsynth::qa
