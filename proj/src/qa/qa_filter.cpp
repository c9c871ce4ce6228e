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

#include "qa/qa_filter.hpp"

#include "qa/normalize.hpp"

namespace dialogsynth::qa {

ErrorRateReport score_transcript(std::string_view reference, std::string_view hypothesis,
                                 Language language) {
  const auto ref = normalize_text(reference, language);
  const auto hyp = normalize_text(hypothesis, language);
  return align<std::string>(ref, hyp);
}

QaDecision qa_filter(backends::ModelClients& clients, const corpus::DialogueRecord& dialogue,
                     std::span<const Waveform> audio, const QaThresholds& thresholds) {
  if (audio.size() != dialogue.dialog.size()) {
    throw PreconditionError("dialogue '" + dialogue.id + "': " + std::to_string(audio.size()) +
                            " audio turns for " + std::to_string(dialogue.dialog.size()) +
                            " text turns");
  }
  QaDecision d;
  d.dialogue_id = dialogue.id;
  d.language = dialogue.language();
  d.threshold = thresholds.for_language(d.language);
  for (std::size_t k = 0; k < audio.size(); ++k) {
    TurnQa t;
    t.turn = k;
    try {
      t.hypothesis = clients.transcribe(audio[k], d.language);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBackend && e.code() != ErrorCode::kPrecondition) throw;
      d.keep = false;
      d.drop_reason = "asr_error";
      d.detail = "turn " + std::to_string(k) + ": " + e.what();
      return d;
    }
    t.report = score_transcript(dialogue.dialog[k].text, t.hypothesis, d.language);
    d.total += t.report;
    d.turns.push_back(std::move(t));
  }
  if (d.total.ref_len == 0) {
    d.drop_reason = "empty_reference";
    return d;
  }
  d.rate = d.total.rate();
  d.keep = d.rate <= d.threshold;
  if (!d.keep) d.drop_reason = "error_rate";
  return d;
}

nlohmann::ordered_json decision_to_json(const QaDecision& d) {
  nlohmann::ordered_json j;
  j["id"] = d.dialogue_id;
  j["language"] = to_string(d.language);
  j["metric"] = d.language == Language::kZh ? "cer" : "wer";
  nlohmann::ordered_json turns = nlohmann::ordered_json::array();
  for (const auto& t : d.turns) {
    nlohmann::ordered_json tj;
    tj["turn"] = t.turn;
    tj["hypothesis"] = t.hypothesis;
    tj["substitutions"] = t.report.substitutions;
    tj["deletions"] = t.report.deletions;
    tj["insertions"] = t.report.insertions;
    tj["ref_len"] = t.report.ref_len;
    tj["rate"] = t.report.ref_len ? t.report.rate() : 0.0;
    turns.push_back(std::move(tj));
  }
  j["turns"] = std::move(turns);
  j["rate"] = d.rate;
  j["threshold"] = d.threshold;
  j["verdict"] = d.keep ? "keep" : "drop";
  if (!d.keep) j["reason"] = d.drop_reason;
  if (!d.detail.empty()) j["detail"] = d.detail;
  return j;
}

}  // namespace dialogsynth::qa
