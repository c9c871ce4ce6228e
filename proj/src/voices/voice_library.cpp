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

#include "voices/voice_library.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "util/error.hpp"
#include "util/io.hpp"
#include "util/random.hpp"

namespace dialogsynth::voices {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<ClipMeta> read_clip_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingInputError(path.string());
  std::vector<ClipMeta> clips;
  for (const json& row : read_jsonl(path)) {
    ClipMeta c;
    try {
      c.clip_id = row.at("clip_id").get<std::string>();
      c.recording_id = row.at("recording_id").get<std::string>();
      c.duration = row.at("duration").get<double>();
      c.char_count = row.at("char_count").get<int>();
      c.dnsmos = row.at("dnsmos").get<double>();
      c.gender = parse_gender(row.at("gender").get<std::string>());
      c.audio_path = row.value("audio_path", "");
      if (row.contains("embedding")) c.embedding = row["embedding"].get<Embedding>();
    } catch (const json::exception& e) {
      throw PreconditionError(path.string() + ": bad clip record: " + e.what());
    }
    if (!(c.duration > 0.0)) throw PreconditionError("clip '" + c.clip_id + "': duration <= 0");
    if (c.char_count < 1) throw PreconditionError("clip '" + c.clip_id + "': char_count < 1");
    if (!(c.dnsmos >= 1.0 && c.dnsmos <= 5.0)) {
      throw PreconditionError("clip '" + c.clip_id + "': dnsmos outside [1, 5]");
    }
    if (!c.embedding && c.audio_path.empty()) {
      throw PreconditionError("clip '" + c.clip_id + "' has neither embedding nor audio_path");
    }
    clips.push_back(std::move(c));
  }
  return clips;
}

ordered_json clip_to_json(const ClipMeta& c) {
  ordered_json j;
  j["clip_id"] = c.clip_id;
  j["recording_id"] = c.recording_id;
  j["duration"] = c.duration;
  j["char_count"] = c.char_count;
  j["dnsmos"] = c.dnsmos;
  j["gender"] = to_string(c.gender);
  if (!c.audio_path.empty()) j["audio_path"] = c.audio_path;
  if (c.embedding) j["embedding"] = *c.embedding;
  return j;
}

std::map<std::string, std::vector<ClipMeta>> select_premium_recordings(
    std::span<const ClipMeta> clips, double dnsmos_min, std::size_t min_clips) {
  std::map<std::string, std::vector<ClipMeta>> groups;
  for (const ClipMeta& c : clips) {
    if (c.dnsmos >= dnsmos_min) groups[c.recording_id].push_back(c);
  }
  std::erase_if(groups, [&](const auto& kv) { return kv.second.size() < min_clips; });
  return groups;
}

std::size_t required_pairs(std::size_t n) { return 5 * (n / 10); }

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw PreconditionError("cosine of a zero vector");
  return dot / std::sqrt(na * nb);
}

Embedding normalized(std::span<const double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (v.empty() || !(n > 0.0) || !std::isfinite(n)) {
    throw PreconditionError("cannot normalize a zero or non-finite vector");
  }
  Embedding out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

std::size_t count_similar_pairs(std::span<const Embedding> embeddings, double threshold) {
  std::vector<Embedding> unit;
  unit.reserve(embeddings.size());
  for (const auto& e : embeddings) unit.push_back(normalized(e));
  std::size_t count = 0;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    for (std::size_t j = i + 1; j < unit.size(); ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < unit[i].size(); ++k) dot += unit[i][k] * unit[j][k];
      if (dot > threshold) ++count;
    }
  }
  return count;
}

IdentifyOutcome identify_real_speaker(const std::string& recording_id,
                                      std::span<const ClipMeta> clips,
                                      std::span<const Embedding> embeddings,
                                      double sim_threshold) {
  if (clips.size() < kDefaultMinClips) {
    throw PreconditionError("recording '" + recording_id + "' has " +
                            std::to_string(clips.size()) + " clips, need 10");
  }
  if (embeddings.size() != clips.size()) {
    throw PreconditionError("recording '" + recording_id + "': embedding count mismatch");
  }
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (embeddings[i].empty()) {
      throw PreconditionError("clip '" + clips[i].clip_id + "' has no embedding");
    }
  }
  IdentifyOutcome out;
  out.required = required_pairs(clips.size());
  out.qualifying_pairs = count_similar_pairs(embeddings, sim_threshold);
  if (out.qualifying_pairs < out.required) {
    out.reject_reason = "too_few_pairs";
    return out;
  }
  std::size_t male = 0;
  for (const ClipMeta& c : clips) male += c.gender == Gender::kMale;
  if (2 * male == clips.size()) {
    out.reject_reason = "gender_tie";
    return out;
  }
  SpeakerProfile p;
  p.profile_id = recording_id;
  p.gender = 2 * male > clips.size() ? Gender::kMale : Gender::kFemale;
  Embedding mean(embeddings.front().size(), 0.0);
  for (const auto& e : embeddings) {
    const Embedding u = normalized(e);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += u[k];
  }
  p.embedding = normalized(mean);
  p.rate_bucket = compute_speaking_rate(clips);
  for (const ClipMeta& c : clips) p.member_clips.push_back(c.clip_id);
  out.profile = std::move(p);
  return out;
}

int round_to_bucket(double ms_per_char) {
  // Snap away binary noise first so exact decimal ties (197.5) round up.
  const double snapped = std::round(ms_per_char * 1e6) / 1e6;
  return static_cast<int>(std::floor(snapped / 10.0 + 0.5)) * 10;
}

int compute_speaking_rate(std::span<const ClipMeta> clips) {
  double seconds = 0.0;
  long chars = 0;
  for (const ClipMeta& c : clips) {
    seconds += c.duration;
    chars += c.char_count;
  }
  if (chars < 1) throw PreconditionError("speaking rate over zero characters");
  const int bucket = round_to_bucket(1000.0 * seconds / static_cast<double>(chars));
  if (bucket <= 0) throw PreconditionError("speaking rate rounds to 0 ms per character");
  return bucket;
}

VirtualSpeaker build_virtual_speaker(const SpeakerProfile& p1, const SpeakerProfile& p2,
                                     double lambda, std::string speaker_id) {
  if (p1.gender != p2.gender) {
    throw PreconditionError("parents '" + p1.profile_id + "' and '" + p2.profile_id +
                            "' differ in gender");
  }
  if (p1.rate_bucket != p2.rate_bucket) {
    throw PreconditionError("parents '" + p1.profile_id + "' and '" + p2.profile_id +
                            "' differ in rate bucket");
  }
  if (p1.profile_id == p2.profile_id) throw PreconditionError("parents must differ");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw PreconditionError("lambda outside (0, 1]");
  if (p1.embedding.size() != p2.embedding.size()) {
    throw PreconditionError("parent embedding dimensions differ");
  }
  Embedding mix(p1.embedding.size());
  for (std::size_t k = 0; k < mix.size(); ++k) {
    mix[k] = lambda * p1.embedding[k] + (1.0 - lambda) * p2.embedding[k];
  }
  VirtualSpeaker v;
  v.speaker_id = std::move(speaker_id);
  v.embedding = normalized(mix);
  v.gender = p1.gender;
  v.rate_bucket = p1.rate_bucket;
  v.parents = {p1.profile_id, p2.profile_id, lambda};
  return v;
}

namespace {

// Pair sampler over the profiles of one gender.
class PairSampler {
 public:
  PairSampler(std::vector<const SpeakerProfile*> profiles, Gender gender, std::uint64_t seed,
              int max_widen_ms)
      : profiles_(std::move(profiles)), gender_(gender), rng_(seed), max_widen_(max_widen_ms) {
    std::sort(profiles_.begin(), profiles_.end(),
              [](auto* a, auto* b) { return a->profile_id < b->profile_id; });
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      by_bucket_[profiles_[i]->rate_bucket].push_back(i);
      active_.push_back(i);
    }
  }

  // Draws from the narrowest width at which any unused pair remains, so a
  // stratum only widens once its same-bucket pairs are exhausted.
  std::pair<const SpeakerProfile*, const SpeakerProfile*> draw() {
    for (int w = 0; w <= max_widen_ && !active_.empty(); w += 10) {
      std::vector<std::size_t> order = active_;
      rng_.shuffle(order);
      for (std::size_t i : order) {
        const std::vector<std::size_t> candidates = partners(i, w);
        if (candidates.empty()) continue;
        const std::size_t j = candidates[rng_.index(candidates.size())];
        used_.insert(key(i, j));
        return {profiles_[i], profiles_[j]};
      }
    }
    // Nothing left at any width; retire parents so later draws fail fast.
    active_.clear();
    std::string buckets;
    for (const auto& [b, members] : by_bucket_) {
      buckets += (buckets.empty() ? "" : ", ") + std::to_string(b) + " ms x" +
                 std::to_string(members.size());
    }
    throw PreconditionError("voice stratum exhausted: gender " + std::string(to_string(gender_)) +
                            " after " + std::to_string(used_.size()) + " pairs (buckets: " +
                            (buckets.empty() ? "none" : buckets) + ")");
  }

 private:
  std::vector<std::size_t> partners(std::size_t i, int w) const {
    const int bucket = profiles_[i]->rate_bucket;
    std::vector<std::size_t> out;
    for (auto it = by_bucket_.lower_bound(bucket - w);
         it != by_bucket_.end() && it->first <= bucket + w; ++it) {
      for (std::size_t j : it->second) {
        if (j != i && !used_.count(key(i, j))) out.push_back(j);
      }
    }
    return out;
  }

  std::uint64_t key(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(a) * profiles_.size() + b;
  }

  std::vector<const SpeakerProfile*> profiles_;
  Gender gender_;
  Rng rng_;
  int max_widen_;
  std::map<int, std::vector<std::size_t>> by_bucket_;
  std::vector<std::size_t> active_;
  std::unordered_set<std::uint64_t> used_;
};

VirtualSpeaker make_child(const SpeakerProfile& a, const SpeakerProfile& b, double lambda,
                          std::string id, std::size_t& widened) {
  if (a.rate_bucket == b.rate_bucket) return build_virtual_speaker(a, b, lambda, std::move(id));
  // Widened pair: mix directly and take the mean bucket.
  SpeakerProfile b_same = b;
  b_same.rate_bucket = a.rate_bucket;
  VirtualSpeaker v = build_virtual_speaker(a, b_same, lambda, std::move(id));
  v.rate_bucket = round_to_bucket((a.rate_bucket + b.rate_bucket) / 2.0);
  ++widened;
  return v;
}

}  // namespace

const VirtualSpeaker* VoiceLibrary::find(std::string_view speaker_id) const {
  for (const auto* list : {&agents, &users}) {
    for (const auto& v : *list) {
      if (v.speaker_id == speaker_id) return &v;
    }
  }
  return nullptr;
}

bool VoiceLibrary::operator==(const VoiceLibrary& other) const {
  return library_to_json(*this) == library_to_json(other);
}

VoiceLibrary generate_voice_library(std::span<const SpeakerProfile> profiles,
                                    const LibraryOptions& options) {
  if (!(options.lambda > 0.0 && options.lambda < 1.0)) {
    throw PreconditionError("library lambda must lie in (0, 1)");
  }
  std::map<Gender, std::vector<const SpeakerProfile*>> pools;
  for (const auto& p : profiles) pools[p.gender].push_back(&p);
  std::map<Gender, std::size_t> need{
      {Gender::kMale, (options.target_count + 1) / 2},
      {Gender::kFemale, options.target_count / 2},
  };

  VoiceLibrary lib;
  std::map<Gender, std::vector<VirtualSpeaker>> children;
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    const std::size_t total = need[g] + (options.include_agents ? 1 : 0);
    if (total == 0) continue;
    PairSampler sampler(pools[g], g,
                        hash_combine(options.seed, static_cast<std::uint64_t>(g) + 1),
                        options.max_widen_ms);
    if (options.include_agents) {
      auto [a, b] = sampler.draw();
      lib.agents.push_back(
          make_child(*a, *b, options.lambda, std::string(agent_speaker_id(g)), lib.widened));
    }
    for (std::size_t n = 0; n < need[g]; ++n) {
      auto [a, b] = sampler.draw();
      children[g].push_back(make_child(*a, *b, options.lambda, "", lib.widened));
    }
  }
  // Interleave genders and number users in that order.
  unsigned number = 0;
  auto& males = children[Gender::kMale];
  auto& females = children[Gender::kFemale];
  for (std::size_t i = 0; i < std::max(males.size(), females.size()); ++i) {
    for (auto* list : {&males, &females}) {
      if (i >= list->size()) continue;
      VirtualSpeaker v = std::move((*list)[i]);
      v.speaker_id = make_user_speaker_id(++number, v.gender);
      lib.users.push_back(std::move(v));
    }
  }
  return lib;
}

ordered_json profiles_to_json(std::span<const SpeakerProfile> profiles) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : profiles) {
    ordered_json j;
    j["profile_id"] = p.profile_id;
    j["gender"] = to_string(p.gender);
    j["rate_bucket"] = p.rate_bucket;
    j["embedding"] = p.embedding;
    j["member_clips"] = p.member_clips;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<SpeakerProfile> profiles_from_json(const json& j) {
  std::vector<SpeakerProfile> out;
  for (const json& row : j) {
    SpeakerProfile p;
    p.profile_id = row.at("profile_id").get<std::string>();
    p.gender = parse_gender(row.at("gender").get<std::string>());
    p.rate_bucket = row.at("rate_bucket").get<int>();
    p.embedding = row.at("embedding").get<Embedding>();
    p.member_clips = row.at("member_clips").get<std::vector<std::string>>();
    out.push_back(std::move(p));
  }
  return out;
}

ordered_json library_to_json(const VoiceLibrary& library) {
  ordered_json arr = ordered_json::array();
  for (const auto* list : {&library.agents, &library.users}) {
    for (const auto& v : *list) {
      ordered_json j;
      j["speaker_id"] = v.speaker_id;
      j["gender"] = to_string(v.gender);
      j["rate_bucket"] = v.rate_bucket;
      j["embedding"] = v.embedding;
      j["parents"] = {{"first", v.parents.first},
                      {"second", v.parents.second},
                      {"weight", v.parents.weight}};
      arr.push_back(std::move(j));
    }
  }
  return arr;
}

VoiceLibrary library_from_json(const json& j) {
  if (!j.is_array()) throw PreconditionError("voice library must be a JSON list");
  VoiceLibrary lib;
  for (const json& row : j) {
    VirtualSpeaker v;
    try {
      v.speaker_id = row.at("speaker_id").get<std::string>();
      v.gender = parse_gender(row.at("gender").get<std::string>());
      v.rate_bucket = row.at("rate_bucket").get<int>();
      v.embedding = row.at("embedding").get<Embedding>();
      const json& p = row.at("parents");
      v.parents = {p.at("first").get<std::string>(), p.at("second").get<std::string>(),
                   p.at("weight").get<double>()};
    } catch (const json::exception& e) {
      throw PreconditionError(std::string("bad voice library entry: ") + e.what());
    }
    const bool agent = v.speaker_id == kAgentMale || v.speaker_id == kAgentFemale;
    if (!agent && !is_user_speaker_id(v.speaker_id)) {
      throw PreconditionError("bad voice id '" + v.speaker_id + "'");
    }
    (agent ? lib.agents : lib.users).push_back(std::move(v));
  }
  return lib;
}

}  // namespace dialogsynth::voices
