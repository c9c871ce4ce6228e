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

#include "corpus/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dialogsynth::corpus {

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

namespace {

std::string turn_field(std::size_t k, std::string_view name) {
  return "dialog[" + std::to_string(k) + "]." + std::string(name);
}

void check_speakers(const DialogueRecord& r, std::vector<Violation>& out) {
  int users = 0;
  int agents = 0;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < r.speakers.size(); ++i) {
    const auto& s = r.speakers[i];
    const std::string field = "speaker." + s.id;
    if (!seen.insert(s.id).second) {
      out.push_back({"duplicate_speaker", field, "speaker listed twice"});
    }
    if (s.role == Role::kUser) {
      ++users;
      const auto g = user_id_gender(s.id);
      if (!g) {
        out.push_back({"speaker_id_pattern", field,
                       "user id must match SPK<number><m|f>"});
      } else if (*g != s.gender) {
        out.push_back({"gender_mismatch", field,
                       "id suffix disagrees with gender"});
      }
    } else {
      ++agents;
      if (s.id != kAgentMale && s.id != kAgentFemale) {
        out.push_back({"speaker_id_pattern", field,
                       "agent id must be agentMale or agentFemale"});
      } else if (s.id != agent_speaker_id(s.gender)) {
        out.push_back({"gender_mismatch", field,
                       "agent id disagrees with gender"});
      }
    }
  }
  if (users != 1 || agents != 1) {
    out.push_back({"role_count", "speaker",
                   "expected exactly one user and one agent, got " +
                       std::to_string(users) + " users and " +
                       std::to_string(agents) + " agents"});
  }
}

void check_layout(const DialogueRecord& r, std::vector<Violation>& out) {
  const auto& a = r.audio;
  if (a.channel_count < 1) {
    out.push_back({"bad_audio_layout", "audio.channel", "must be >= 1"});
  }
  if (a.sample_rate <= 0) {
    out.push_back({"bad_audio_layout", "audio.sample_rate", "must be > 0"});
  }
  if (!(a.duration >= 0.0) || !std::isfinite(a.duration)) {
    out.push_back({"bad_audio_layout", "audio.duration",
                   "must be finite and >= 0"});
  }
  std::set<int> indices;
  for (std::size_t i = 0; i < r.channels.size(); ++i) {
    const int idx = r.channels[i].channel_index;
    const std::string field = "channel[" + std::to_string(i) + "].channel_index";
    if (idx < 0 || idx >= a.channel_count) {
      out.push_back({"channel_out_of_range", field,
                     "index " + std::to_string(idx) + " >= channel count"});
    }
    if (!indices.insert(idx).second) {
      out.push_back({"duplicate_channel", field, "channel declared twice"});
    }
  }
}

void check_turns(const DialogueRecord& r, std::vector<Violation>& out) {
  if (r.dialog.empty()) {
    out.push_back({"no_turns", "dialog", "dialogue has no turns"});
    return;
  }
  double max_end = 0.0;
  for (std::size_t k = 0; k < r.dialog.size(); ++k) {
    const auto& t = r.dialog[k];
    if (t.text.empty()) {
      out.push_back({"empty_text", turn_field(k, "text"), "empty text"});
    }
    if (t.audio_path.empty()) {
      out.push_back({"empty_audio_path", turn_field(k, "audio_path"),
                     "empty audio path"});
    }
    if (!(t.start >= 0.0) || !(t.start < t.end) || !std::isfinite(t.end)) {
      out.push_back({"bad_interval", turn_field(k, "start"),
                     "require 0 <= start < end"});
    }
    if (r.find_speaker(t.speaker) == nullptr) {
      out.push_back({"unknown_speaker", turn_field(k, "speaker"),
                     "speaker '" + t.speaker + "' not in speaker map"});
    }
    if (t.channel < 0 || t.channel >= r.audio.channel_count) {
      out.push_back({"channel_out_of_range", turn_field(k, "channel"),
                     "channel " + std::to_string(t.channel) +
                         " >= channel count"});
    }
    if (k > 0) {
      const auto& prev = r.dialog[k - 1];
      if (t.start < prev.start) {
        out.push_back({"unsorted", turn_field(k, "start"),
                       "turns not sorted by start"});
      } else if (prev.end > t.start + kTimeTolerance) {
        out.push_back({"overlap", turn_field(k, "start"),
                       "turn overlaps its predecessor"});
      }
    }
    max_end = std::max(max_end, t.end);
  }
  if (std::abs(max_end - r.audio.duration) > kTimeTolerance) {
    out.push_back({"duration_mismatch", "audio.duration",
                   "last turn end " + std::to_string(max_end) +
                       " != duration " + std::to_string(r.audio.duration)});
  }
}

}  // namespace

ValidationReport validate_record(const DialogueRecord& record) {
  ValidationReport report{record.id, {}};
  if (record.id.empty()) {
    report.violations.push_back({"empty_id", "id", "dialogue id is empty"});
  }
  check_speakers(record, report.violations);
  check_layout(record, report.violations);
  check_turns(record, report.violations);
  return report;
}

}  // namespace dialogsynth::corpus
