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

#include "ops/corpus_ops.hpp"

#include <algorithm>
#include <limits>

#include "qa/eval.hpp"
#include "qa/normalize.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

namespace dialogsynth::ops {

using nlohmann::ordered_json;

HoldoutSplit holdout_split(std::span<const corpus::DialogueRecord> corpus,
                           std::size_t dev_per_gender, std::size_t test_per_gender,
                           std::uint64_t seed) {
  std::map<Gender, std::vector<std::string>> users;
  {
    std::map<Gender, std::set<std::string>> seen;
    for (const auto& r : corpus) {
      if (const auto* u = r.user()) seen[u->gender].insert(u->id);
    }
    for (auto& [g, ids] : seen) users[g].assign(ids.begin(), ids.end());
  }
  HoldoutSplit out;
  for (Gender g : {Gender::kMale, Gender::kFemale}) {
    auto& pool = users[g];
    if (pool.size() < dev_per_gender + test_per_gender) {
      throw PreconditionError("holdout needs " + std::to_string(dev_per_gender + test_per_gender) +
                              " " + std::string(to_string(g)) + " user speakers, corpus has " +
                              std::to_string(pool.size()));
    }
    Rng rng(hash_combine(seed, static_cast<std::uint64_t>(g) + 1));
    rng.shuffle(pool);
    out.dev_speakers.insert(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(dev_per_gender));
    out.test_speakers.insert(
        pool.begin() + static_cast<std::ptrdiff_t>(dev_per_gender),
        pool.begin() + static_cast<std::ptrdiff_t>(dev_per_gender + test_per_gender));
  }
  for (const auto& r : corpus) {
    const auto* u = r.user();
    if (u && out.dev_speakers.count(u->id)) {
      out.dev.push_back(r.id);
    } else if (u && out.test_speakers.count(u->id)) {
      out.test.push_back(r.id);
    } else {
      out.train.push_back(r.id);
    }
  }
  return out;
}

namespace {

std::size_t dialogue_words(const corpus::DialogueRecord& r) {
  std::size_t words = 0;
  for (const auto& t : r.dialog) words += qa::normalize_text(t.text, r.language()).size();
  return words;
}

}  // namespace

CorpusStats compute_stats(std::span<const corpus::DialogueRecord> corpus) {
  CorpusStats s;
  std::map<Language, double> word_sum, second_sum;
  for (Language l : {Language::kZh, Language::kEn}) s.languages[l] = {};
  std::map<Role, std::map<Gender, std::set<std::string>>> speakers;
  for (const auto& r : corpus) {
    const Language l = r.language();
    LanguageStats& ls = s.languages[l];
    const std::size_t words = dialogue_words(r);
    const double seconds = r.audio.duration;
    if (ls.dialogues == 0) {
      ls.min_words = ls.max_words = words;
      ls.min_seconds = ls.max_seconds = seconds;
    } else {
      ls.min_words = std::min(ls.min_words, words);
      ls.max_words = std::max(ls.max_words, words);
      ls.min_seconds = std::min(ls.min_seconds, seconds);
      ls.max_seconds = std::max(ls.max_seconds, seconds);
    }
    ++ls.dialogues;
    word_sum[l] += static_cast<double>(words);
    second_sum[l] += seconds;
    for (const auto& sp : r.speakers) speakers[sp.role][sp.gender].insert(sp.id);
  }
  for (auto& [l, ls] : s.languages) {
    if (ls.dialogues == 0) continue;
    ls.mean_words = word_sum[l] / static_cast<double>(ls.dialogues);
    ls.mean_seconds = second_sum[l] / static_cast<double>(ls.dialogues);
    ls.hours = second_sum[l] / 3600.0;
  }
  for (Role role : {Role::kUser, Role::kAgent}) {
    for (Gender g : {Gender::kMale, Gender::kFemale}) {
      s.speakers[role][g] = speakers[role][g].size();
      s.total_speakers += speakers[role][g].size();
    }
  }
  return s;
}

ordered_json CorpusStats::to_json() const {
  ordered_json j;
  ordered_json langs;
  for (Language l : {Language::kZh, Language::kEn}) {
    const LanguageStats& ls = languages.at(l);
    ordered_json o;
    o["dialogues"] = ls.dialogues;
    o["max_words"] = ls.max_words;
    o["min_words"] = ls.min_words;
    o["mean_words"] = ls.mean_words;
    o["duration_hours"] = ls.hours;
    o["max_duration_seconds"] = ls.max_seconds;
    o["min_duration_seconds"] = ls.min_seconds;
    o["mean_duration_seconds"] = ls.mean_seconds;
    langs[std::string(to_string(l))] = std::move(o);
  }
  j["languages"] = std::move(langs);
  ordered_json sp;
  sp["user_male"] = speakers.at(Role::kUser).at(Gender::kMale);
  sp["user_female"] = speakers.at(Role::kUser).at(Gender::kFemale);
  sp["agent_male"] = speakers.at(Role::kAgent).at(Gender::kMale);
  sp["agent_female"] = speakers.at(Role::kAgent).at(Gender::kFemale);
  sp["total"] = total_speakers;
  j["speakers"] = std::move(sp);
  return j;
}

std::string CorpusStats::render_table() const {
  const LanguageStats& zh = languages.at(Language::kZh);
  const LanguageStats& en = languages.at(Language::kEn);
  std::string out;
  auto row = [&](const std::string& label, const std::string& a, const std::string& b) {
    std::string line = label;
    line.resize(std::max<std::size_t>(line.size() + 1, 28), ' ');
    std::string left = a;
    left.resize(std::max<std::size_t>(left.size() + 1, 14), ' ');
    out += line + left + b + "\n";
  };
  auto spanning = [&](const std::string& label, std::size_t v) {
    row(label, std::to_string(v), "");
  };
  auto f2 = [](double v) { return qa::format_fixed(v); };
  row("Items", "Chinese", "English");
  row("Dialogues", std::to_string(zh.dialogues), std::to_string(en.dialogues));
  row("Max words per dialogue", std::to_string(zh.max_words), std::to_string(en.max_words));
  row("Min words per dialogue", std::to_string(zh.min_words), std::to_string(en.min_words));
  row("Mean words per dialogue", f2(zh.mean_words), f2(en.mean_words));
  row("Duration(h)", f2(zh.hours), f2(en.hours));
  row("Max dialogue Duration(s)", f2(zh.max_seconds), f2(en.max_seconds));
  row("Min dialogue Duration(s)", f2(zh.min_seconds), f2(en.min_seconds));
  row("Mean dialogue Duration(s)", f2(zh.mean_seconds), f2(en.mean_seconds));
  spanning("User male speakers", speakers.at(Role::kUser).at(Gender::kMale));
  spanning("User female speakers", speakers.at(Role::kUser).at(Gender::kFemale));
  spanning("Agent male speakers", speakers.at(Role::kAgent).at(Gender::kMale));
  spanning("Agent female speakers", speakers.at(Role::kAgent).at(Gender::kFemale));
  spanning("Total Speakers", total_speakers);
  return out;
}

ordered_json utterance_to_json(const Utterance& u, bool with_flag) {
  ordered_json j;
  j["audio_path"] = u.audio_path;
  j["text"] = u.text;
  j["language"] = to_string(u.language);
  j["speaker"] = u.speaker;
  j["dialogue_id"] = u.dialogue_id;
  j["duration"] = u.duration;
  if (with_flag) j["under_sampled"] = u.under_sampled;
  return j;
}

namespace {

Utterance make_utterance(const corpus::DialogueRecord& r, const corpus::TurnRecord& t) {
  Utterance u;
  u.dialogue_id = r.id;
  u.speaker = t.speaker;
  u.language = r.language();
  u.audio_path = t.audio_path;
  u.text = qa::join_tokens(qa::normalize_text(t.text, u.language));
  u.duration = t.end - t.start;
  return u;
}

}  // namespace

std::vector<Utterance> derive_asr_dataset(std::span<const corpus::DialogueRecord> corpus,
                                          const std::set<std::string>& subset) {
  std::vector<Utterance> out;
  for (const auto& r : corpus) {
    if (!subset.empty() && !subset.count(r.id)) continue;
    const auto* user = r.user();
    for (const auto& t : r.dialog) {
      if (user && t.speaker == user->id) out.push_back(make_utterance(r, t));
    }
  }
  return out;
}

TtsDataset derive_tts_dataset(std::span<const corpus::DialogueRecord> corpus,
                              std::size_t per_speaker, std::uint64_t seed) {
  std::map<std::pair<std::string, Language>, std::vector<Utterance>> pools;
  for (const auto& r : corpus) {
    for (const auto& t : r.dialog) pools[{t.speaker, r.language()}].push_back(make_utterance(r, t));
  }
  TtsDataset out;
  for (auto& [key, pool] : pools) {
    std::sort(pool.begin(), pool.end(), [](const Utterance& a, const Utterance& b) {
      return a.audio_path < b.audio_path;
    });
    Rng rng(stable_hash(key.first + "/" + std::string(to_string(key.second)), seed));
    rng.shuffle(pool);
    const bool under = pool.size() < per_speaker;
    if (under) out.under_sampled[key] = pool.size();
    const std::size_t take = std::min(per_speaker, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
      pool[i].under_sampled = under;
      out.utterances.push_back(std::move(pool[i]));
    }
  }
  return out;
}

}  // namespace dialogsynth::ops
