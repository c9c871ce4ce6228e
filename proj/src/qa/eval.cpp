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

#include "qa/eval.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "qa/qa_filter.hpp"
#include "text/spoken_style.hpp"
#include "util/json_scan.hpp"
#include "util/unicode.hpp"

namespace dialogsynth::qa {

S2tifScore parse_s2tif(std::string_view reply) {
  const auto object = first_json_object(reply);
  if (!object) throw ParseError("judge reply holds no JSON object", 0);
  const std::size_t offset = static_cast<std::size_t>(object->data() - reply.data());
  const auto j = nlohmann::json::parse(*object, nullptr, false);
  if (!j.is_object()) throw ParseError("judge reply object is not valid JSON", offset);
  auto score = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
      throw ParseError(std::string("judge reply lacks integer '") + key + "'", offset);
    }
    const auto v = it->get<long long>();
    if (v < 1 || v > 5) {
      throw ParseError(std::string("judge '") + key + "' score " + std::to_string(v) +
                           " outside [1, 5]",
                       offset);
    }
    return static_cast<int>(v);
  };
  S2tifScore s;
  s.content = score("content");
  s.style = score("style");
  return s;
}

S2tifScore s2tif_judge(backends::ModelClients& clients, const text::PromptSet& prompts,
                       std::string_view instruction_transcript, std::string_view response_text,
                       Language language) {
  if (unicode::trim(instruction_transcript).empty() || unicode::trim(response_text).empty()) {
    throw PreconditionError("s2tif judging needs a non-empty instruction and response");
  }
  const std::string prompt = prompts.get(text::TemplateName::kS2tifJudge)
                                 .fill({{"instruction", std::string(instruction_transcript)},
                                        {"response", std::string(response_text)}});
  S2tifScore s = parse_s2tif(clients.chat_complete(prompt));
  s.response_length = text::count_words(response_text, language);
  return s;
}

ErrorRateReport modality_alignment(backends::ModelClients& clients,
                                   std::string_view response_text,
                                   const Waveform& response_audio, Language language) {
  if (unicode::trim(response_text).empty()) throw PreconditionError("response text is empty");
  const std::string transcript = clients.transcribe(response_audio, language);
  ErrorRateReport r = score_transcript(response_text, transcript, language);
  if (r.ref_len == 0) throw PreconditionError("response text normalizes to nothing");
  return r;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string QualitySummary::render() const {
  return format_fixed(mean) + " ± " + format_fixed(std);
}

QualitySummary summarize_scores(std::span<const double> scores) {
  if (scores.empty()) throw PreconditionError("quality summary over an empty sample");
  QualitySummary q;
  q.n = scores.size();
  double sum = 0.0;
  for (double s : scores) sum += s;
  q.mean = sum / static_cast<double>(q.n);
  double var = 0.0;
  for (double s : scores) var += (s - q.mean) * (s - q.mean);
  q.std = std::sqrt(var / static_cast<double>(q.n));
  return q;
}

QualitySummary aggregate_quality(backends::ModelClients& clients,
                                 std::span<const Waveform> sample, backends::MosMetric metric) {
  std::vector<double> scores;
  scores.reserve(sample.size());
  for (const Waveform& w : sample) scores.push_back(clients.score_mos(w, metric));
  return summarize_scores(scores);
}

}  // namespace dialogsynth::qa
