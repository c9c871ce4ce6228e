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
#include <string>
#include <string_view>
#include <vector>

#include "backends/client.hpp"
#include "corpus/types.hpp"
#include "synth/watermark.hpp"
#include "voices/voice_library.hpp"

namespace dialogsynth::synth {

struct VoiceAssignment {
  std::string dialogue_id;
  std::string user_voice;
  std::string agent_voice;
  bool operator==(const VoiceAssignment&) const = default;
};

// Uniform draws seeded by (seed, dialogue_id), so the assignment does not
// depend on processing order.
VoiceAssignment assign_voices(std::string_view dialogue_id, const voices::VoiceLibrary& library,
                              std::uint64_t seed);

struct DialogueText {
  std::string id;
  Language language = Language::kEn;
  std::string instruction;
  std::string response;
};

struct SynthOptions {
  int sample_rate = kDefaultSampleRate;
  WatermarkKey watermark;
};

struct SynthesizedDialogue {
  corpus::DialogueRecord record;
  std::vector<Waveform> turns;  // watermarked, in turn order
};

std::string turn_audio_path(std::string_view dialogue_id, std::size_t turn);
std::string session_audio_path(std::string_view dialogue_id);

// User turn on channel 0 then the agent turn on channel 1, back to back.
// Throws PreconditionError if a text fails the spoken-style check or a turn
// is too short to carry a watermark; backend errors propagate.
SynthesizedDialogue synthesize_dialogue(backends::ModelClients& clients,
                                        const Watermarker& watermarker, const DialogueText& text,
                                        const VoiceAssignment& assignment,
                                        const voices::VoiceLibrary& library,
                                        const SynthOptions& options);

// Two-channel session: each channel carries its own turns and silence
// elsewhere.
std::pair<Waveform, Waveform> session_channels(const SynthesizedDialogue& d);

}  // namespace dialogsynth::synth
