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

#include "ops/partition.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "util/error.hpp"
#include "util/random.hpp"

namespace dialogsynth::ops {

namespace {

constexpr double kSecondsPerHour = 3600.0;

std::vector<std::string> speakers_of(const corpus::DialogueRecord& r) {
  std::vector<std::string> out;
  for (const auto& s : r.speakers) out.push_back(s.id);
  return out;
}

}  // namespace

PartitionSpec PartitionSpec::defaults(std::uint64_t seed) {
  PartitionSpec spec;
  spec.seed = seed;
  spec.subsets = {
      {"XS", {{Language::kZh, 1000}, {Language::kEn, 500}}, false},
      {"S", {{Language::kZh, 4000}, {Language::kEn, 2000}}, false},
      {"M", {{Language::kZh, 10000}, {Language::kEn, 5000}}, false},
      {"L", {{Language::kZh, 20000}, {Language::kEn, 10000}}, false},
      {"XL", {}, true},
  };
  return spec;
}

PartitionSpec PartitionSpec::only(std::span<const std::string> names) const {
  PartitionSpec out = *this;
  out.subsets.clear();
  for (const auto& s : subsets) {
    if (std::find(names.begin(), names.end(), s.name) != names.end()) out.subsets.push_back(s);
  }
  for (const auto& n : names) {
    if (std::none_of(out.subsets.begin(), out.subsets.end(),
                     [&](const SubsetTarget& t) { return t.name == n; })) {
      throw PreconditionError("unknown subset '" + n + "'");
    }
  }
  return out;
}

PartitionResult partition(std::span<const corpus::DialogueRecord> corpus,
                          const PartitionSpec& spec, const std::vector<std::string>* roster) {
  if (!(spec.scale > 0.0)) throw PreconditionError("partition scale must be positive");
  const std::size_t n = corpus.size();

  // Speakers and per-language totals.
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  std::map<Language, double> available;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& s : speakers_of(corpus[i])) by_speaker[s].push_back(i);
    available[corpus[i].language()] += corpus[i].audio.duration;
  }
  if (roster) {
    for (const auto& s : *roster) {
      if (!by_speaker.count(s)) {
        throw PreconditionError("speaker '" + s + "' has no dialogue; coverage impossible");
      }
    }
  }

  // Targets must grow strictly and fit in the corpus.
  std::map<Language, double> previous;
  for (const auto& t : spec.subsets) {
    if (t.all) continue;
    for (const auto& [lang, hours] : t.hours) {
      const double seconds = hours * spec.scale * kSecondsPerHour;
      if (previous.count(lang) && !(seconds > previous[lang])) {
        throw PreconditionError("subset '" + t.name + "' target for " +
                                std::string(to_string(lang)) + " does not exceed the previous");
      }
      previous[lang] = seconds;
      if (seconds > available[lang] + 1e-9) {
        throw PreconditionError("subset '" + t.name + "' needs " + std::to_string(seconds) +
                                " s of " + std::string(to_string(lang)) + " but the corpus has " +
                                std::to_string(available[lang]) + " s");
      }
    }
  }

  // Seeded order, independent of input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return corpus[a].id < corpus[b].id; });
  for (std::size_t i = 1; i < n; ++i) {
    if (corpus[order[i]].id == corpus[order[i - 1]].id) {
      throw PreconditionError("duplicate dialogue id '" + corpus[order[i]].id + "'");
    }
  }
  Rng rng(spec.seed);
  rng.shuffle(order);
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k;

  PartitionResult result;
  std::vector<bool> in(n, false);
  std::vector<std::size_t> members;  // selection order
  std::map<Language, double> have;
  std::map<std::string, int> speaker_count;

  auto add = [&](std::size_t i) {
    in[i] = true;
    members.push_back(i);
    have[corpus[i].language()] += corpus[i].audio.duration;
    for (const auto& s : speakers_of(corpus[i])) ++speaker_count[s];
  };
  auto remove = [&](std::size_t i) {
    in[i] = false;
    std::erase(members, i);
    have[corpus[i].language()] -= corpus[i].audio.duration;
    for (const auto& s : speakers_of(corpus[i])) --speaker_count[s];
  };

  for (std::size_t si = 0; si < spec.subsets.size(); ++si) {
    const SubsetTarget& t = spec.subsets[si];
    Subset out;
    out.name = t.name;
    if (t.all) {
      for (std::size_t i : order) {
        if (!in[i]) add(i);
      }
    } else {
      for (const auto& [lang, hours] : t.hours) {
        out.target_seconds[lang] = hours * spec.scale * kSecondsPerHour;
      }
      auto short_of = [&](Language l) {
        auto it = out.target_seconds.find(l);
        return it != out.target_seconds.end() && have[l] < it->second;
      };
      for (std::size_t i : order) {
        if (!in[i] && short_of(corpus[i].language())) add(i);
      }
    }

    if (si == 0) {
      // Coverage repair: bring in the shortest dialogue of each missing
      // speaker, then drop the longest dialogues nobody depends on while
      // the language stays on target.
      for (const auto& [speaker, dialogues] : by_speaker) {
        if (speaker_count[speaker] > 0) continue;
        const std::size_t pick = *std::min_element(
            dialogues.begin(), dialogues.end(), [&](std::size_t a, std::size_t b) {
              if (corpus[a].audio.duration != corpus[b].audio.duration) {
                return corpus[a].audio.duration < corpus[b].audio.duration;
              }
              return rank[a] < rank[b];
            });
        add(pick);
      }
      if (!t.all) {
        // Removing a dialogue never makes another removable, so one pass
        // from longest to shortest equals repeatedly taking the longest.
        std::vector<std::size_t> by_length = members;
        std::sort(by_length.begin(), by_length.end(), [&](std::size_t a, std::size_t b) {
          if (corpus[a].audio.duration != corpus[b].audio.duration) {
            return corpus[a].audio.duration > corpus[b].audio.duration;
          }
          return rank[a] > rank[b];
        });
        for (std::size_t i : by_length) {
          const Language l = corpus[i].language();
          auto target = out.target_seconds.find(l);
          const double floor = target == out.target_seconds.end() ? 0.0 : target->second;
          if (have[l] - corpus[i].audio.duration < floor) continue;
          const auto sp = speakers_of(corpus[i]);
          if (std::any_of(sp.begin(), sp.end(),
                          [&](const std::string& sid) { return speaker_count[sid] <= 1; })) {
            continue;
          }
          remove(i);
        }
      }
    }

    for (std::size_t i : members) out.ids.push_back(corpus[i].id);
    out.seconds = have;
    result.subsets.push_back(std::move(out));
  }
  return result;
}

}  // namespace dialogsynth::ops
