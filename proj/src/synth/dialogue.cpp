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

#include "synth/dialogue.hpp"

#include <algorithm>

#include "text/spoken_style.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

namespace dialogsynth::synth {

VoiceAssignment assign_voices(std::string_view dialogue_id, const voices::VoiceLibrary& library,
                              std::uint64_t seed) {
  if (library.users.empty()) throw PreconditionError("voice library has no user voices");
  Rng rng(stable_hash(dialogue_id, seed));
  VoiceAssignment a;
  a.dialogue_id = std::string(dialogue_id);
  a.user_voice = library.users[rng.index(library.users.size())].speaker_id;
  a.agent_voice = std::string(agent_speaker_id(rng.index(2) == 0 ? Gender::kMale
                                                                  : Gender::kFemale));
  return a;
}

std::string turn_audio_path(std::string_view dialogue_id, std::size_t turn) {
  const std::string id(dialogue_id);
  return id + "/" + id + "_" + std::to_string(turn) + "_mark.wav";
}

std::string session_audio_path(std::string_view dialogue_id) {
  const std::string id(dialogue_id);
  return id + "/" + id + "_session.wav";
}

SynthesizedDialogue synthesize_dialogue(backends::ModelClients& clients,
                                        const Watermarker& watermarker, const DialogueText& text,
                                        const VoiceAssignment& assignment,
                                        const voices::VoiceLibrary& library,
                                        const SynthOptions& options) {
  const auto* user = library.find(assignment.user_voice);
  const auto* agent = library.find(assignment.agent_voice);
  if (!user) throw PreconditionError("voice '" + assignment.user_voice + "' not in library");
  if (!agent) throw PreconditionError("voice '" + assignment.agent_voice + "' not in library");
  const std::pair<const std::string*, text::TextRole> texts[] = {
      {&text.instruction, text::TextRole::kInstruction},
      {&text.response, text::TextRole::kResponse}};
  for (const auto& [t, role] : texts) {
    const auto violations = text::validate_spoken_text(*t, text.language, role);
    if (!violations.empty()) {
      throw PreconditionError("dialogue '" + text.id + "' text fails style check: " +
                              violations.front().code);
    }
  }

  SynthesizedDialogue out;
  corpus::DialogueRecord& r = out.record;
  r.id = text.id;
  r.speakers = {{user->speaker_id, Role::kUser, user->gender},
                {agent->speaker_id, Role::kAgent, agent->gender}};
  r.audio.channel_count = 2;
  r.audio.sample_rate = options.sample_rate;
  r.channels = {{0, text.language}, {1, text.language}};

  const std::pair<const voices::VirtualSpeaker*, const std::string*> turns[] = {
      {user, &text.instruction}, {agent, &text.response}};
  double clock = 0.0;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& [voice, words] = turns[k];
    Waveform w = clients.synthesize(*words, voice->voice(), options.sample_rate);
    if (w.duration() < options.watermark.min_detect_seconds) {
      throw PreconditionError("dialogue '" + text.id + "' turn " + std::to_string(k) +
                              " lasts " + std::to_string(w.duration()) +
                              " s, too short to watermark");
    }
    w = watermarker.embed(w, options.watermark);
    corpus::TurnRecord turn;
    turn.channel = static_cast<int>(k);
    turn.speaker = voice->speaker_id;
    turn.text = *words;
    // Times come from sample counts so they stay exact under re-synthesis.
    turn.start = clock;
    offset += w.samples.size();
    clock = static_cast<double>(offset) / options.sample_rate;
    turn.end = clock;
    turn.audio_path = turn_audio_path(text.id, k);
    r.dialog.push_back(std::move(turn));
    out.turns.push_back(std::move(w));
  }
  r.audio.duration = clock;
  return out;
}

std::pair<Waveform, Waveform> session_channels(const SynthesizedDialogue& d) {
  std::size_t total = 0;
  for (const auto& w : d.turns) total += w.samples.size();
  const int rate = d.record.audio.sample_rate;
  Waveform left, right;
  left.sample_rate = right.sample_rate = rate;
  left.samples.assign(total, 0.0f);
  right.samples.assign(total, 0.0f);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < d.turns.size(); ++k) {
    auto& dst = d.record.dialog[k].channel == 0 ? left : right;
    std::copy(d.turns[k].samples.begin(), d.turns[k].samples.end(),
              dst.samples.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += d.turns[k].samples.size();
  }
  return {std::move(left), std::move(right)};
}

}  // namespace dialogsynth::synth
