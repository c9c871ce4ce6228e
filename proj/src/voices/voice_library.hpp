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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "backends/types.hpp"
#include "corpus/types.hpp"
#include "json.hpp"

namespace dialogsynth::voices {

using Embedding = std::vector<double>;

// One short clip cut from a long source recording.
struct ClipMeta {
  std::string clip_id;
  std::string recording_id;
  double duration = 0.0;
  int char_count = 0;
  double dnsmos = 0.0;
  Gender gender = Gender::kMale;
  std::string audio_path;
  // Precomputed speaker embedding; when absent the embed backend is asked.
  std::optional<Embedding> embedding;
};

// JSON-lines manifest. Throws PreconditionError naming the clip on a
// violated field invariant.
std::vector<ClipMeta> read_clip_manifest(const std::filesystem::path& path);
nlohmann::ordered_json clip_to_json(const ClipMeta& clip);

struct SpeakerProfile {
  std::string profile_id;
  Embedding embedding;
  Gender gender = Gender::kMale;
  int rate_bucket = 0;  // ms per character, multiple of 10
  std::vector<std::string> member_clips;
};

struct ParentPair {
  std::string first;
  std::string second;
  double weight = 0.5;
  bool operator==(const ParentPair&) const = default;
};

struct VirtualSpeaker {
  std::string speaker_id;
  Embedding embedding;
  Gender gender = Gender::kMale;
  int rate_bucket = 0;
  ParentPair parents;

  backends::Voice voice() const { return {speaker_id, embedding}; }
};

inline constexpr double kDefaultDnsmosMin = 4.0;
inline constexpr std::size_t kDefaultMinClips = 10;
inline constexpr double kDefaultSimThreshold = 0.97;

// Clips with dnsmos >= dnsmos_min, grouped by recording; recordings with
// fewer than min_clips survivors are dropped. Clip order is preserved.
std::map<std::string, std::vector<ClipMeta>> select_premium_recordings(
    std::span<const ClipMeta> clips, double dnsmos_min = kDefaultDnsmosMin,
    std::size_t min_clips = kDefaultMinClips);

std::size_t required_pairs(std::size_t n);
double cosine(std::span<const double> a, std::span<const double> b);
// Unit vector along v; throws PreconditionError for a zero or empty vector.
Embedding normalized(std::span<const double> v);
// Unordered pairs i < j with cosine strictly above the threshold.
std::size_t count_similar_pairs(std::span<const Embedding> embeddings, double threshold);

struct IdentifyOutcome {
  std::optional<SpeakerProfile> profile;
  std::size_t qualifying_pairs = 0;
  std::size_t required = 0;
  std::string reject_reason;  // "too_few_pairs" or "gender_tie"
};

// `embeddings` must hold one vector per clip, in clip order. Throws
// PreconditionError for fewer than 10 clips or a missing embedding.
IdentifyOutcome identify_real_speaker(const std::string& recording_id,
                                      std::span<const ClipMeta> clips,
                                      std::span<const Embedding> embeddings,
                                      double sim_threshold = kDefaultSimThreshold);

// 1000 * sum(duration) / sum(chars), rounded to the nearest 10 ms with ties
// rounding up.
int compute_speaking_rate(std::span<const ClipMeta> clips);
int round_to_bucket(double ms_per_char);

// normalize(lambda * e1 + (1 - lambda) * e2). Requires matching gender and
// rate bucket and distinct profiles; lambda in (0, 1].
VirtualSpeaker build_virtual_speaker(const SpeakerProfile& p1, const SpeakerProfile& p2,
                                     double lambda, std::string speaker_id);

struct LibraryOptions {
  std::size_t target_count = 0;  // user voices; agents come on top
  std::uint64_t seed = 0;
  double lambda = 0.5;
  bool include_agents = true;
  int max_widen_ms = 30;
};

struct VoiceLibrary {
  std::vector<VirtualSpeaker> agents;  // agentMale, agentFemale
  std::vector<VirtualSpeaker> users;
  std::size_t widened = 0;  // voices whose parents differ in rate bucket; not persisted

  const VirtualSpeaker* find(std::string_view speaker_id) const;
  bool operator==(const VoiceLibrary& other) const;
};

// Samples unordered same-gender parent pairs without replacement. Once no
// same-bucket pair is left in a gender, the search widens by 10 ms steps up
// to max_widen_ms; the child then takes the mean bucket. Throws
// PreconditionError naming the stratum when no pair is left.
VoiceLibrary generate_voice_library(std::span<const SpeakerProfile> profiles,
                                    const LibraryOptions& options);

nlohmann::ordered_json profiles_to_json(std::span<const SpeakerProfile> profiles);
std::vector<SpeakerProfile> profiles_from_json(const nlohmann::json& j);
// A flat list: agents first, then users.
nlohmann::ordered_json library_to_json(const VoiceLibrary& library);
VoiceLibrary library_from_json(const nlohmann::json& j);

}  // namespace dialogsynth::voices
