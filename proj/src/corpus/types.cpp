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

#include "corpus/types.hpp"

#include <cctype>

#include "util/error.hpp"

namespace dialogsynth {

std::string_view to_string(Language lang) {
  return lang == Language::kZh ? "zh" : "en";
}

std::string_view to_string(Gender gender) {
  return gender == Gender::kMale ? "male" : "female";
}

std::string_view to_string(Role role) {
  return role == Role::kUser ? "user" : "agent";
}

Language parse_language(std::string_view s) {
  if (s == "zh") return Language::kZh;
  if (s == "en") return Language::kEn;
  throw PreconditionError("unknown language '" + std::string(s) + "'");
}

Gender parse_gender(std::string_view s) {
  if (s == "male") return Gender::kMale;
  if (s == "female") return Gender::kFemale;
  throw PreconditionError("unknown gender '" + std::string(s) + "'");
}

Role parse_role(std::string_view s) {
  if (s == "user") return Role::kUser;
  if (s == "agent") return Role::kAgent;
  throw PreconditionError("unknown role '" + std::string(s) + "'");
}

bool is_user_speaker_id(std::string_view id) {
  if (id.size() < 5 || id.substr(0, 3) != "SPK") return false;
  const char suffix = id.back();
  if (suffix != 'm' && suffix != 'f') return false;
  for (char c : id.substr(3, id.size() - 4)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::optional<Gender> user_id_gender(std::string_view id) {
  if (!is_user_speaker_id(id)) return std::nullopt;
  return id.back() == 'm' ? Gender::kMale : Gender::kFemale;
}

std::string make_user_speaker_id(unsigned number, Gender gender) {
  return "SPK" + std::to_string(number) +
         (gender == Gender::kMale ? "m" : "f");
}

std::string_view agent_speaker_id(Gender gender) {
  return gender == Gender::kMale ? kAgentMale : kAgentFemale;
}

namespace corpus {

const SpeakerRef* DialogueRecord::find_speaker(std::string_view speaker_id) const {
  for (const auto& s : speakers) {
    if (s.id == speaker_id) return &s;
  }
  return nullptr;
}

const SpeakerRef* DialogueRecord::user() const {
  for (const auto& s : speakers) {
    if (s.role == Role::kUser) return &s;
  }
  return nullptr;
}

const SpeakerRef* DialogueRecord::agent() const {
  for (const auto& s : speakers) {
    if (s.role == Role::kAgent) return &s;
  }
  return nullptr;
}

Language DialogueRecord::language() const {
  return channels.empty() ? Language::kEn : channels.front().language;
}

}  // namespace corpus
}  // namespace dialogsynth
