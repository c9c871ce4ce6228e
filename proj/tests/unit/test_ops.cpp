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

#include <algorithm>
#include <set>

#include "doctest.h"
#include "ops/corpus_ops.hpp"
#include "ops/partition.hpp"
#include "support.hpp"
#include "util/error.hpp"

using namespace dialogsynth;
using namespace dialogsynth::ops;
using corpus::DialogueRecord;

namespace {

DialogueRecord dialogue(std::string id, std::string user, Language lang, double seconds,
                        std::string agent = "agentMale", std::string q = "how are you",
                        std::string a = "fine thanks") {
  DialogueRecord r;
  r.id = id;
  const Gender ug = *user_id_gender(user);
  const Gender ag = agent == "agentMale" ? Gender::kMale : Gender::kFemale;
  r.speakers = {{user, Role::kUser, ug}, {agent, Role::kAgent, ag}};
  r.channels = {{0, lang}, {1, lang}};
  r.dialog = {{0, user, std::move(q), 0.0, seconds / 2, id + "/" + id + "_0_mark.wav"},
              {1, agent, std::move(a), seconds / 2, seconds, id + "/" + id + "_1_mark.wav"}};
  r.audio.duration = seconds;
  return r;
}

// n dialogues over `users` user speakers, two in three Chinese.
std::vector<DialogueRecord> synthetic_corpus(std::size_t n, unsigned users, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DialogueRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned u = 1 + static_cast<unsigned>(rng.index(users));
    const Gender g = u % 2 ? Gender::kMale : Gender::kFemale;
    out.push_back(dialogue("d" + std::to_string(1000 + i), make_user_speaker_id(u, g),
                           i % 3 == 2 ? Language::kEn : Language::kZh, 5.0 + 25.0 * rng.uniform(),
                           rng.index(2) ? "agentMale" : "agentFemale"));
  }
  return out;
}

std::map<Language, double> totals(const std::vector<DialogueRecord>& c) {
  std::map<Language, double> t;
  for (const auto& r : c) t[r.language()] += r.audio.duration;
  return t;
}

std::map<Language, double> max_len(const std::vector<DialogueRecord>& c) {
  std::map<Language, double> t;
  for (const auto& r : c) t[r.language()] = std::max(t[r.language()], r.audio.duration);
  return t;
}

double scale_for(const std::vector<DialogueRecord>& c, double fraction) {
  const auto t = totals(c);
  return fraction * std::min(t.at(Language::kZh), 2 * t.at(Language::kEn)) / (1000 * 3600.0);
}

std::set<std::string> speakers_in(const std::vector<DialogueRecord>& c,
                                  const std::vector<std::string>& ids) {
  std::set<std::string> want(ids.begin(), ids.end()), out;
  for (const auto& r : c) {
    if (!want.count(r.id)) continue;
    for (const auto& s : r.speakers) out.insert(s.id);
  }
  return out;
}

}  // namespace

TEST_CASE("default subset targets") {
  const auto spec = PartitionSpec::defaults(3);
  REQUIRE(spec.subsets.size() == 5);
  CHECK(spec.subsets[0].hours.at(Language::kZh) == 1000);
  CHECK(spec.subsets[0].hours.at(Language::kEn) == 500);
  CHECK(spec.subsets[3].hours.at(Language::kZh) == 20000);
  CHECK(spec.subsets[4].all);
  const std::vector<std::string> pick{"S", "XS"};
  const auto only = spec.only(pick);
  REQUIRE(only.subsets.size() == 2);
  CHECK(only.subsets[0].name == "XS");
  const std::vector<std::string> bad{"XXL"};
  CHECK_THROWS_AS(spec.only(bad), PreconditionError);
}

TEST_CASE("partitions are nested, covering and tight") {
  const auto corpus = synthetic_corpus(500, 24, 5);
  const auto all_speakers = speakers_in(corpus, [&] {
    std::vector<std::string> ids;
    for (const auto& r : corpus) ids.push_back(r.id);
    return ids;
  }());
  const auto longest = max_len(corpus);
  const std::vector<std::string> names{"XS", "S", "XL"};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto spec = PartitionSpec::defaults(seed).only(names);
    spec.scale = scale_for(corpus, 0.2);
    const auto result = partition(corpus, spec);
    REQUIRE(result.subsets.size() == 3);
    const auto& xs = result.subsets[0];
    const auto& s = result.subsets[1];
    const auto& xl = result.subsets[2];
    std::set<std::string> xs_ids(xs.ids.begin(), xs.ids.end()), s_ids(s.ids.begin(), s.ids.end());
    CHECK(std::includes(s_ids.begin(), s_ids.end(), xs_ids.begin(), xs_ids.end()));
    CHECK(xl.ids.size() == corpus.size());
    CHECK(speakers_in(corpus, xs.ids) == all_speakers);
    for (const auto* sub : {&xs, &s}) {
      for (const auto& [lang, target] : sub->target_seconds) {
        const double got = sub->seconds.at(lang);
        CHECK(got >= target);
        CHECK(got < target + longest.at(lang));
      }
    }
  }
}

TEST_CASE("partition depends on the seed, not the input order") {
  auto corpus = synthetic_corpus(120, 8, 2);
  auto spec = PartitionSpec::defaults(9).only(std::vector<std::string>{"XS"});
  spec.scale = scale_for(corpus, 0.3);
  const auto a = partition(corpus, spec);
  std::reverse(corpus.begin(), corpus.end());
  const auto b = partition(corpus, spec);
  CHECK(a.subsets[0].ids == b.subsets[0].ids);
  spec.seed = 10;
  CHECK(partition(corpus, spec).subsets[0].ids != a.subsets[0].ids);
}

TEST_CASE("partition preconditions") {
  auto corpus = synthetic_corpus(60, 6, 1);
  auto spec = PartitionSpec::defaults(1).only(std::vector<std::string>{"XS", "S"});
  spec.scale = scale_for(corpus, 0.5);  // S would need twice the corpus
  CHECK_THROWS_AS(partition(corpus, spec), PreconditionError);
  spec.scale = 0;
  CHECK_THROWS_AS(partition(corpus, spec), PreconditionError);
  spec.scale = scale_for(corpus, 0.1);
  const std::vector<std::string> roster{"SPK1m", "SPK99f"};
  CHECK_THROWS_AS(partition(corpus, spec, &roster), PreconditionError);
  PartitionSpec flat = spec;
  flat.subsets[1].hours = flat.subsets[0].hours;
  CHECK_THROWS_AS(partition(corpus, flat), PreconditionError);
  corpus.push_back(corpus.front());
  CHECK_THROWS_AS(partition(corpus, spec), PreconditionError);
}

TEST_CASE("holdout routes whole speakers to dev and test") {
  const auto corpus = synthetic_corpus(200, 12, 4);
  const auto h = holdout_split(corpus, 1, 2, 8);
  CHECK(h.dev_speakers.size() == 2);
  CHECK(h.test_speakers.size() == 4);
  CHECK(h.train.size() + h.dev.size() + h.test.size() == corpus.size());
  std::map<std::string, std::string> user_of;
  for (const auto& r : corpus) user_of[r.id] = r.user()->id;
  for (const auto& id : h.dev) CHECK(h.dev_speakers.count(user_of[id]));
  for (const auto& id : h.test) CHECK(h.test_speakers.count(user_of[id]));
  for (const auto& id : h.train) {
    CHECK_FALSE(h.dev_speakers.count(user_of[id]));
    CHECK_FALSE(h.test_speakers.count(user_of[id]));
  }
  std::size_t male = 0;
  for (const auto& s : h.test_speakers) male += *user_id_gender(s) == Gender::kMale;
  CHECK(male == 2);
  CHECK(holdout_split(corpus, 1, 2, 8).dev == h.dev);
  CHECK_THROWS_AS(holdout_split(corpus, 3, 4, 8), PreconditionError);
}

TEST_CASE("statistics over a hand-sized corpus") {
  const std::vector<DialogueRecord> c{
      dialogue("a", "SPK1m", Language::kEn, 10.0, "agentMale", "What is rain?",
               "Water from clouds."),                                              // 6 words
      dialogue("b", "SPK2f", Language::kEn, 20.0, "agentFemale", "Why?", "Because."),  // 2
      dialogue("c", "SPK1m", Language::kZh, 7.2, "agentMale", "你好吗？", "我很好。"),   // 6
  };
  const auto s = compute_stats(c);
  const auto& en = s.languages.at(Language::kEn);
  CHECK(en.dialogues == 2);
  CHECK(en.min_words == 2);
  CHECK(en.max_words == 6);
  CHECK(en.mean_words == 4.0);
  CHECK(en.hours == doctest::Approx(30.0 / 3600));
  CHECK(en.mean_seconds == 15.0);
  const auto& zh = s.languages.at(Language::kZh);
  CHECK(zh.max_words == 6);
  CHECK(zh.min_seconds == 7.2);
  CHECK(s.speakers.at(Role::kUser).at(Gender::kMale) == 1);
  CHECK(s.speakers.at(Role::kUser).at(Gender::kFemale) == 1);
  CHECK(s.speakers.at(Role::kAgent).at(Gender::kFemale) == 1);
  CHECK(s.total_speakers == 4);
  const auto j = s.to_json();
  CHECK(j.at("languages").at("en").at("dialogues") == 2);
  CHECK(j.at("speakers").at("total") == 4);
  const std::string table = s.render_table();
  CHECK(table.find("Dialogues") == table.find('\n') + 1);
  CHECK(table.find("Mean words per dialogue     6.00          4.00") != std::string::npos);
  CHECK(table.find("Total Speakers              4") != std::string::npos);

  const auto empty = compute_stats({});
  CHECK(empty.languages.at(Language::kZh).dialogues == 0);
  CHECK(empty.total_speakers == 0);
}

TEST_CASE("ASR and TTS training manifests") {
  const std::vector<DialogueRecord> c{
      dialogue("a", "SPK1m", Language::kEn, 10.0, "agentMale", "What is RAIN?", "Water."),
      dialogue("b", "SPK1m", Language::kEn, 8.0),
      dialogue("c", "SPK1m", Language::kEn, 6.0),
      dialogue("d", "SPK2f", Language::kZh, 4.0, "agentMale", "你好", "好的"),
  };
  const auto asr = derive_asr_dataset(c);
  REQUIRE(asr.size() == 4);
  CHECK(asr[0].text == "what is rain");
  CHECK(asr[0].speaker == "SPK1m");
  CHECK(asr[0].duration == 5.0);
  CHECK(asr[0].audio_path == "a/a_0_mark.wav");
  CHECK(derive_asr_dataset(c, {"d"}).size() == 1);
  const auto j = utterance_to_json(asr[3], false);
  CHECK(j.at("text") == "你 好");
  CHECK_FALSE(j.contains("under_sampled"));

  const auto tts = derive_tts_dataset(c, 2, 1);
  std::map<std::pair<std::string, Language>, std::size_t> per;
  for (const auto& u : tts.utterances) ++per[{u.speaker, u.language}];
  CHECK(per.at({"SPK1m", Language::kEn}) == 2);
  CHECK(per.at({"agentMale", Language::kEn}) == 2);
  CHECK(per.at({"agentMale", Language::kZh}) == 1);
  CHECK(per.at({"SPK2f", Language::kZh}) == 1);
  CHECK(tts.under_sampled.size() == 2);
  CHECK(tts.under_sampled.at({"SPK2f", Language::kZh}) == 1);
  for (const auto& u : tts.utterances) {
    CHECK(u.under_sampled == (u.speaker == "SPK2f" || u.language == Language::kZh));
  }
  const auto again = derive_tts_dataset(c, 2, 1);
  REQUIRE(again.utterances.size() == tts.utterances.size());
  for (std::size_t i = 0; i < tts.utterances.size(); ++i) {
    CHECK(again.utterances[i].audio_path == tts.utterances[i].audio_path);
  }
}
