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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dialogsynth {

enum class Language { kZh, kEn };
enum class Gender { kMale, kFemale };
enum class Role { kUser, kAgent };

std::string_view to_string(Language lang);
std::string_view to_string(Gender gender);
std::string_view to_string(Role role);
// Throw PreconditionError on unknown names.
Language parse_language(std::string_view s);
Gender parse_gender(std::string_view s);
Role parse_role(std::string_view s);

inline constexpr std::string_view kAgentMale = "agentMale";
inline constexpr std::string_view kAgentFemale = "agentFemale";

// "SPK<digits><m|f>" for users; the two agent literals for agents.
bool is_user_speaker_id(std::string_view id);
std::optional<Gender> user_id_gender(std::string_view id);
std::string make_user_speaker_id(unsigned number, Gender gender);
std::string_view agent_speaker_id(Gender gender);

namespace corpus {

struct SpeakerRef {
  std::string id;
  Role role = Role::kUser;
  Gender gender = Gender::kMale;
  bool operator==(const SpeakerRef&) const = default;
};

struct TurnRecord {
  int channel = 0;
  std::string speaker;
  std::string text;
  double start = 0.0;
  double end = 0.0;
  std::string audio_path;
  bool operator==(const TurnRecord&) const = default;
};

struct AudioLayout {
  int channel_count = 2;
  double duration = 0.0;
  int sample_rate = 22050;
  bool operator==(const AudioLayout&) const = default;
};

struct ChannelInfo {
  int channel_index = 0;
  Language language = Language::kEn;
  bool operator==(const ChannelInfo&) const = default;
};

// One single-turn spoken dialogue. Speakers keep their serialized order.
struct DialogueRecord {
  std::string id;
  std::vector<SpeakerRef> speakers;
  AudioLayout audio;
  std::vector<ChannelInfo> channels;
  std::vector<TurnRecord> dialog;

  bool operator==(const DialogueRecord&) const = default;

  const SpeakerRef* find_speaker(std::string_view speaker_id) const;
  const SpeakerRef* user() const;
  const SpeakerRef* agent() const;
  // Language of the first channel; en if no channels are declared.
  Language language() const;
};

}  // namespace corpus
}  // namespace dialogsynth
