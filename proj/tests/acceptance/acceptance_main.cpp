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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// nonzero if any fails. Every backend is a built-in mock.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "backends/client.hpp"
#include "backends/mock.hpp"
#include "corpus/metadata.hpp"
#include "corpus/validate.hpp"
#include "ops/partition.hpp"
#include "pipeline/config.hpp"
#include "pipeline/fixtures.hpp"
#include "pipeline/pipeline.hpp"
#include "qa/edit_distance.hpp"
#include "qa/qa_filter.hpp"
#include "synth/dsp.hpp"
#include "synth/watermark.hpp"
#include "synth/wav.hpp"
#include "util/random.hpp"
#include "voices/voice_library.hpp"
#include "../support.hpp"

using namespace dialogsynth;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

backends::RetryPolicy no_sleep() {
  backends::RetryPolicy r;
  r.sleep = [](std::chrono::milliseconds) {};
  return r;
}

// ---------------------------------------------------------------- pipeline

struct RunResult {
  double seconds = 0.0;
  fs::path root;
};

RunResult run_demo(const fs::path& dir) {
  pipeline::DemoOptions opts;
  opts.instructions = 200;
  const auto config_path = pipeline::write_demo_fixtures(dir, opts);
  const auto start = std::chrono::steady_clock::now();
  pipeline::Pipeline p(pipeline::load_config(config_path));
  p.run_all();
  RunResult r;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.root = p.layout().root;
  return r;
}

Outcome check_e2e(const RunResult& run) {
  Outcome o;
  const pipeline::Layout layout{run.root};
  const std::string bytes = read_file(layout.corpus_metadata());
  const auto records = corpus::decode_metadata(bytes);
  std::size_t bad = 0;
  for (const auto& r : records) bad += !corpus::validate_record(r).ok();
  const bool stable = corpus::encode_metadata(records) == bytes;
  const auto profiles = voices::profiles_from_json(nlohmann::json::parse(read_file(layout.profiles())));
  const auto library = voices::library_from_json(nlohmann::json::parse(read_file(layout.library())));
  const auto audio = pipeline::validate_corpus(layout.corpus_metadata(), true);
  bool subsets = true;
  for (const char* name : {"XS", "S"}) {
    subsets = subsets && pipeline::validate_corpus(layout.subset_metadata(name), true).at("valid") == true;
  }
  const bool stats = fs::exists(layout.stats_json()) && fs::exists(layout.stats_table());
  o.pass = run.seconds < 60.0 && !records.empty() && bad == 0 && stable && profiles.size() >= 8 &&
           library.users.size() >= 20 && audio.at("valid") == true && subsets && stats;
  o.detail = fmt("%.1f s, %zu kept, %zu invalid, round-trip %s, %zu profiles, %zu voices",
                 run.seconds, records.size(), bad, stable ? "stable" : "UNSTABLE", profiles.size(),
                 library.users.size());
  return o;
}

Outcome check_determinism(const RunResult& a, const RunResult& b) {
  const pipeline::Layout la{a.root}, lb{b.root};
  std::vector<fs::path> files{la.corpus_metadata(), la.library(), la.profiles(), la.audit(),
                              la.pipeline_report(), la.stats_json(), la.stats_table(),
                              la.eval_summary()};
  for (auto s : pipeline::all_stages()) files.push_back(la.report(s));
  std::size_t differ = 0;
  for (const auto& f : files) {
    const auto other = lb.root / fs::relative(f, la.root);
    if (!fs::exists(f) || read_file(f) != read_file(other)) ++differ;
  }
  // Audio too.
  std::size_t wavs = 0;
  for (const auto& e : fs::recursive_directory_iterator(la.corpus())) {
    if (e.path().extension() != ".wav") continue;
    ++wavs;
    if (read_file(e.path()) != read_file(lb.root / fs::relative(e.path(), la.root))) ++differ;
  }
  return {differ == 0, fmt("%zu artifacts and %zu wav files compared, %zu differ",
                           files.size(), wavs, differ)};
}

// ------------------------------------------------------------ edit distance

std::size_t dp_oracle(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    }
  }
  return d[a.size()][b.size()];
}

// The reported S/D/I must be a genuine edit script: S + D == |ref| - matches,
// S + I == |hyp| - matches, and the total must equal the optimum.
bool consistent(const qa::ErrorRateReport& r, const std::string& a, const std::string& b) {
  if (r.ref_len != a.size()) return false;
  if (r.deletions > a.size() || r.insertions > b.size()) return false;
  return a.size() - r.deletions == b.size() - r.insertions;
}

Outcome check_edit_distance() {
  std::vector<std::string> strings{""};
  for (std::size_t len = 1; len <= 6; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::string s;
      for (std::size_t i = 0; i < len; ++i) s += (mask >> i) & 1 ? 'b' : 'a';
      strings.push_back(s);
    }
  }
  std::size_t pairs = 0, mismatches = 0;
  auto compare = [&](const std::string& a, const std::string& b) {
    ++pairs;
    const auto r = qa::align<char>(a, b);
    if (r.edits() != dp_oracle(a, b) || !consistent(r, a, b)) ++mismatches;
  };
  for (const auto& a : strings) {
    for (const auto& b : strings) compare(a, b);
  }
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    auto draw = [&] {
      std::string s(rng.index(13), 'a');
      for (auto& c : s) c = static_cast<char>('a' + rng.index(4));
      return s;
    };
    compare(draw(), draw());
  }
  return {mismatches == 0, fmt("%zu pairs, %zu mismatches", pairs, mismatches)};
}

// ------------------------------------------------------------------ QA gate

Outcome check_qa_gate() {
  static const char* kWords[] = {"river", "market", "planet", "garden", "coffee", "window",
                                 "silver", "morning", "travel", "yellow", "simple", "number",
                                 "history", "people", "energy", "kitchen", "moment", "answer"};
  Rng rng(11);
  backends::MockTts tts;
  std::vector<corpus::DialogueRecord> dialogues;
  std::vector<std::vector<Waveform>> audio;
  for (int d = 0; d < 100; ++d) {
    corpus::DialogueRecord r;
    r.id = fmt("q%03d", d);
    r.speakers = {{"SPK1m", Role::kUser, Gender::kMale}, {"agentFemale", Role::kAgent, Gender::kFemale}};
    r.channels = {{0, Language::kEn}, {1, Language::kEn}};
    std::vector<Waveform> turns;
    for (int t = 0; t < 2; ++t) {
      std::string text;
      const std::size_t words = 8 + rng.index(8);
      for (std::size_t w = 0; w < words; ++w) {
        text += (w ? " " : "") + std::string(kWords[rng.index(std::size(kWords))]);
      }
      r.dialog.push_back({t, t ? "agentFemale" : "SPK1m", text, 0.0, 0.0, ""});
      turns.push_back(tts.synthesize(text, {}, 16000));
    }
    dialogues.push_back(std::move(r));
    audio.push_back(std::move(turns));
  }
  std::vector<double> rates;
  for (double p : {0.0, 0.02, 0.05, 0.1, 0.2}) {
    backends::MockConfig cfg;
    cfg.seed = 5;
    cfg.char_error_rate = p;
    auto clients = backends::make_clients({}, cfg, no_sleep());
    std::size_t kept = 0;
    for (std::size_t i = 0; i < dialogues.size(); ++i) {
      kept += qa::qa_filter(*clients, dialogues[i], audio[i]).keep;
    }
    rates.push_back(static_cast<double>(kept) / dialogues.size());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < rates.size(); ++i) monotone = monotone && rates[i] <= rates[i - 1];
  return {rates[0] == 1.0 && rates[4] < 0.05 && monotone,
          fmt("acceptance %.2f %.2f %.2f %.2f %.2f", rates[0], rates[1], rates[2], rates[3],
              rates[4])};
}

// --------------------------------------------------------- speaker identity

Outcome check_speaker_identification() {
  Rng rng(31);
  constexpr std::size_t kDim = 256, kClips = 12;
  std::vector<voices::Embedding> centres;
  std::vector<std::vector<voices::Embedding>> recordings;
  for (int r = 0; r < 10; ++r) {
    const auto c = testing::unit_vector(rng, kDim);
    std::vector<voices::Embedding> clips;
    for (std::size_t k = 0; k < kClips; ++k) {
      voices::Embedding e = c;
      for (auto& x : e) x += 0.004 * rng.normal();
      clips.push_back(e);
    }
    centres.push_back(c);
    recordings.push_back(std::move(clips));
  }
  // Recordings mixing several talkers: three shared clips give 3 pairs,
  // below the 5 a twelve-clip recording needs.
  std::vector<std::vector<voices::Embedding>> impostors;
  for (int r = 0; r < 10; ++r) {
    const auto shared = testing::unit_vector(rng, kDim);
    std::vector<voices::Embedding> clips;
    for (std::size_t k = 0; k < kClips; ++k) {
      clips.push_back(k < 3 ? shared : testing::unit_vector(rng, kDim));
    }
    impostors.push_back(std::move(clips));
  }
  auto cos = [](const voices::Embedding& a, const voices::Embedding& b) {
    return testing::dot(a, b) / std::sqrt(testing::dot(a, a) * testing::dot(b, b));
  };
  double min_intra = 1.0, max_inter = -1.0;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    for (std::size_t i = 0; i < kClips; ++i) {
      for (std::size_t j = i + 1; j < kClips; ++j) {
        min_intra = std::min(min_intra, cos(recordings[r][i], recordings[r][j]));
      }
      for (std::size_t s = r + 1; s < recordings.size(); ++s) {
        for (std::size_t j = 0; j < kClips; ++j) {
          max_inter = std::max(max_inter, cos(recordings[r][i], recordings[s][j]));
        }
      }
    }
  }
  auto oracle_pairs = [&](const std::vector<voices::Embedding>& es) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < es.size(); ++i) {
      for (std::size_t j = i + 1; j < es.size(); ++j) n += cos(es[i], es[j]) > 0.97;
    }
    return n;
  };
  const std::size_t required = 5 * (kClips / 10);
  std::size_t tp = 0, fp = 0, fn = 0, count_mismatch = 0;
  auto identify = [&](const std::string& id, const std::vector<voices::Embedding>& es,
                      bool genuine) {
    std::vector<voices::ClipMeta> clips;
    for (std::size_t k = 0; k < es.size(); ++k) {
      voices::ClipMeta c;
      c.clip_id = id + "_" + std::to_string(k);
      c.recording_id = id;
      c.duration = 3.0;
      c.char_count = 15;
      c.dnsmos = 4.2;
      c.gender = k % 3 ? Gender::kFemale : Gender::kMale;
      c.audio_path = c.clip_id + ".wav";
      clips.push_back(c);
    }
    const auto out = voices::identify_real_speaker(id, clips, es, 0.97);
    const std::size_t oracle = oracle_pairs(es);
    if (out.qualifying_pairs != oracle || out.required != required) ++count_mismatch;
    const bool accepted = out.profile.has_value();
    if (accepted != (oracle >= required)) ++count_mismatch;
    if (accepted && genuine) ++tp;
    if (accepted && !genuine) ++fp;
    if (!accepted && genuine) ++fn;
  };
  for (std::size_t r = 0; r < recordings.size(); ++r) identify(fmt("rec%zu", r), recordings[r], true);
  for (std::size_t r = 0; r < impostors.size(); ++r) identify(fmt("mix%zu", r), impostors[r], false);
  const double precision = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
  return {min_intra >= 0.98 && max_inter <= 0.5 && precision == 1.0 && recall == 1.0 &&
              count_mismatch == 0,
          fmt("intra >= %.4f, inter <= %.3f, precision %.2f, recall %.2f, %zu count mismatches",
              min_intra, max_inter, precision, recall, count_mismatch)};
}

// ------------------------------------------------------------ voice library

Outcome check_voice_library() {
  Rng rng(41);
  std::vector<voices::SpeakerProfile> profiles;
  for (int i = 0; i < 120; ++i) {
    voices::SpeakerProfile p;
    p.profile_id = fmt("prof%03d", i);
    p.gender = i % 2 ? Gender::kFemale : Gender::kMale;
    p.rate_bucket = 180 + 10 * ((i / 2) % 3);
    p.embedding = testing::unit_vector(rng, 64);
    profiles.push_back(std::move(p));
  }
  std::map<std::string, const voices::SpeakerProfile*> by_id;
  for (const auto& p : profiles) by_id[p.profile_id] = &p;
  voices::LibraryOptions opts;
  opts.target_count = 1000;
  opts.seed = 3;
  const auto lib = voices::generate_voice_library(profiles, opts);
  std::size_t male = 0, female = 0, norm_bad = 0, parent_bad = 0, mix_bad = 0;
  std::set<std::pair<std::string, std::string>> pairs;
  std::size_t dup = 0;
  for (const auto* list : {&lib.agents, &lib.users}) {
    for (const auto& v : *list) {
      if (list == &lib.users) (v.gender == Gender::kMale ? male : female)++;
      if (std::abs(std::sqrt(testing::dot(v.embedding, v.embedding)) - 1.0) > 1e-6) ++norm_bad;
      const auto* a = by_id.at(v.parents.first);
      const auto* b = by_id.at(v.parents.second);
      if (a == b || a->gender != v.gender || b->gender != v.gender ||
          a->rate_bucket != b->rate_bucket || v.rate_bucket != a->rate_bucket) {
        ++parent_bad;
      }
      std::vector<double> mix(a->embedding.size());
      double n = 0;
      for (std::size_t k = 0; k < mix.size(); ++k) {
        mix[k] = 0.5 * a->embedding[k] + 0.5 * b->embedding[k];
        n += mix[k] * mix[k];
      }
      for (std::size_t k = 0; k < mix.size(); ++k) {
        if (std::abs(mix[k] / std::sqrt(n) - v.embedding[k]) > 1e-9) {
          ++mix_bad;
          break;
        }
      }
      if (!pairs.insert(std::minmax(v.parents.first, v.parents.second)).second) ++dup;
    }
  }
  return {lib.users.size() == 1000 && male == 500 && female == 500 && norm_bad == 0 &&
              parent_bad == 0 && mix_bad == 0 && dup == 0,
          fmt("%zu users (%zu m / %zu f), %zu off-norm, %zu bad parents, %zu bad mixes, %zu "
              "duplicate pairs",
              lib.users.size(), male, female, norm_bad, parent_bad, mix_bad, dup)};
}

// ---------------------------------------------------------------- partition

Outcome check_partition() {
  Rng rng(51);
  std::vector<corpus::DialogueRecord> corpus;
  std::map<Language, double> total, longest;
  std::set<std::string> speakers;
  for (int i = 0; i < 500; ++i) {
    const unsigned u = 1 + static_cast<unsigned>(rng.index(30));
    const Gender g = u % 2 ? Gender::kMale : Gender::kFemale;
    const std::string user = make_user_speaker_id(u, g);
    const std::string agent = rng.index(2) ? "agentMale" : "agentFemale";
    const Language lang = i % 3 == 2 ? Language::kEn : Language::kZh;
    const double secs = 4.0 + 30.0 * rng.uniform();
    corpus::DialogueRecord r;
    r.id = fmt("p%04d", i);
    r.speakers = {{user, Role::kUser, g},
                  {agent, Role::kAgent, agent == "agentMale" ? Gender::kMale : Gender::kFemale}};
    r.channels = {{0, lang}, {1, lang}};
    r.dialog = {{0, user, "q", 0.0, secs / 2, r.id + "/a.wav"},
                {1, agent, "a", secs / 2, secs, r.id + "/b.wav"}};
    r.audio.duration = secs;
    total[lang] += secs;
    longest[lang] = std::max(longest[lang], secs);
    speakers.insert(user);
    speakers.insert(agent);
    corpus.push_back(std::move(r));
  }
  std::map<std::string, const corpus::DialogueRecord*> by_id;
  for (const auto& r : corpus) by_id[r.id] = &r;
  // XS and S targets take 20% and 80% of the limiting language.
  const double scale =
      0.2 * std::min(total[Language::kZh], 2 * total[Language::kEn]) / (1000 * 3600.0);
  int nested = 0, covered = 0, tight = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = ops::PartitionSpec::defaults(seed).only(std::vector<std::string>{"XS", "S"});
    spec.scale = scale;
    const auto result = ops::partition(corpus, spec);
    const auto& xs = result.subsets.at(0);
    const auto& s = result.subsets.at(1);
    std::set<std::string> xs_ids(xs.ids.begin(), xs.ids.end()), s_ids(s.ids.begin(), s.ids.end());
    nested += std::includes(s_ids.begin(), s_ids.end(), xs_ids.begin(), xs_ids.end());
    std::set<std::string> seen;
    for (const auto& id : xs_ids) {
      for (const auto& sp : by_id.at(id)->speakers) seen.insert(sp.id);
    }
    covered += seen == speakers;
    bool ok = true;
    for (const auto* sub : {&xs, &s}) {
      std::map<Language, double> got;
      for (const auto& id : sub->ids) got[by_id.at(id)->language()] += by_id.at(id)->audio.duration;
      for (Language l : {Language::kZh, Language::kEn}) {
        const double target = scale * 3600.0 * (sub == &xs ? (l == Language::kZh ? 1000 : 500)
                                                            : (l == Language::kZh ? 4000 : 2000));
        ok = ok && std::abs(got[l] - target) <= longest[l];
      }
    }
    tight += ok;
  }
  return {nested == 20 && covered == 20 && tight == 20,
          fmt("nested %d/20, covering %d/20, within one dialogue %d/20", nested, covered, tight)};
}

// ---------------------------------------------------------------- watermark

// Speech-like 1 s hosts: kind 0 is a few modulated partials, kind 1 mock
// speech, kind 2 a voiced source with unvoiced bursts over a noise floor.
Waveform speech_like_host(Rng& rng, int kind, int rate) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<std::size_t>(rate));
  if (kind == 0) {
    const int partials = 1 + static_cast<int>(rng.index(5));
    std::vector<double> f, a, ph;
    for (int k = 0; k < partials; ++k) {
      f.push_back(80.0 + 3000.0 * rng.uniform());
      a.push_back(0.03 + 0.14 * rng.uniform());  // peak stays below full scale
      ph.push_back(6.283 * rng.uniform());
    }
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      const double t = static_cast<double>(i) / rate;
      double v = 0;
      for (int k = 0; k < partials; ++k) v += a[k] * std::sin(6.2831853 * f[k] * t + ph[k]);
      w.samples[i] = static_cast<float>(v * (0.6 + 0.4 * std::sin(6.2831853 * 3 * t)));
    }
  } else if (kind == 1) {
    std::string text;
    for (int i = 0; i < 20; ++i) text += static_cast<char>('a' + rng.index(26));
    w = backends::MockTts{}.synthesize(text, {}, rate);
    w.samples.resize(static_cast<std::size_t>(rate));
  } else {
    // 125 ms segments, one in five unvoiced; harmonics with vibrato, then a
    // one-pole low-pass as a crude vocal tract.
    const double f0 = 90.0 + 160.0 * rng.uniform();
    const double level = 0.3 + 0.7 * rng.uniform();
    std::vector<bool> unvoiced(8);
    for (auto&& u : unvoiced) u = rng.index(5) == 0;
    double phase = 0, lp = 0;
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      const double t = static_cast<double>(i) / rate;
      phase += 6.2831853 * f0 * (1 + 0.03 * std::sin(6.2831853 * 5 * t)) / rate;
      double v = 0;
      if (unvoiced[std::min<std::size_t>(7, static_cast<std::size_t>(t * 8))]) {
        v = 0.05 * rng.normal();
      } else {
        for (int h = 1; h <= 12; ++h) v += 0.1 * std::sin(h * phase) / h;
      }
      lp = 0.7 * lp + 0.3 * v;
      w.samples[i] = static_cast<float>(level * lp + 0.002 * rng.normal());
    }
  }
  return w;
}

// Broadband coloured noise with a stationary deviation of 0.02 to 0.2.
Waveform noise_host(Rng& rng, int rate) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<std::size_t>(rate));
  const double pole = 0.99 * rng.uniform();
  const double gain = (0.02 + 0.18 * rng.uniform()) * std::sqrt(1 - pole * pole);
  double prev = 0;
  for (auto& s : w.samples) {
    prev = pole * prev + gain * rng.normal();
    s = static_cast<float>(prev);
  }
  return w;
}

Outcome check_watermark() {
  synth::SpreadSpectrumWatermarker wm;
  Rng rng(61);
  std::size_t hits = 0, nulls = 0, false_alarms = 0, loud = 0;
  double worst_db = 0.0;
  constexpr int kHosts = 1000;
  // Every clip goes through 16-bit storage, as on disk.
  auto stored = [](const Waveform& w) { return wav::decode(wav::encode(w)); };
  for (int i = 0; i < kHosts; ++i) {
    const Waveform host = speech_like_host(rng, i % 3, kDefaultSampleRate);
    const synth::WatermarkKey key{rng.next()};
    const Waveform marked = wm.embed(host, key);
    const double change = std::abs(dsp::rms_db(marked.samples) - dsp::rms_db(host.samples));
    worst_db = std::max(worst_db, change);
    loud += change >= 0.5;
    hits += wm.detect(stored(marked), key).detected;
    // Negatives: the unmarked host, unmarked noise, and the mark under a
    // different key.
    const synth::WatermarkKey other{key.key + 1};
    false_alarms += wm.detect(stored(host), key).detected;
    false_alarms += wm.detect(stored(noise_host(rng, kDefaultSampleRate)), key).detected;
    false_alarms += wm.detect(stored(marked), other).detected;
    nulls += 3;
  }
  const double tpr = static_cast<double>(hits) / kHosts;
  const double fpr = static_cast<double>(false_alarms) / static_cast<double>(nulls);
  return {tpr >= 0.99 && fpr <= 0.01 && loud == 0,
          fmt("TPR %.3f, FPR %.4f over %zu nulls, max RMS change %.3f dB", tpr, fpr, nulls,
              worst_db)};
}

// -------------------------------------------------------------- SNR mixing

Outcome check_snr() {
  Rng rng(71);
  double worst = 0.0;
  backends::MockTts tts;
  for (int trial = 0; trial < 10; ++trial) {
    std::string text;
    for (int i = 0; i < 30; ++i) text += static_cast<char>('a' + rng.index(26));
    const Waveform speech = tts.synthesize(text, {}, 16000);
    Waveform bed;
    bed.sample_rate = 16000;
    bed.samples.resize(3000 + rng.index(30000));
    double prev = 0;
    const double pole = 0.9 * rng.uniform();
    for (auto& s : bed.samples) {
      prev = pole * prev + 0.05 * rng.normal();
      s = static_cast<float>(prev);
    }
    for (double snr : {0.0, 10.0, 30.0, 50.0}) {
      const Waveform mixed = dsp::mix_noise(speech, bed, snr);
      double ps = 0, pn = 0;
      for (std::size_t i = 0; i < speech.samples.size(); ++i) {
        const double n = static_cast<double>(mixed.samples[i]) - speech.samples[i];
        ps += static_cast<double>(speech.samples[i]) * speech.samples[i];
        pn += n * n;
      }
      worst = std::max(worst, std::abs(10 * std::log10(ps / pn) - snr));
    }
  }
  return {worst < 0.1, fmt("worst deviation %.4f dB over 40 mixes", worst)};
}

void report(bool& all, const char* name, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s %-24s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

}  // namespace

int main() {
  bool all = true;
  testing::TempDir dir;
  RunResult first, second;
  report(all, "e2e-desk-run", [&] {
    first = run_demo(dir / "run1");
    return check_e2e(first);
  });
  report(all, "edit-distance", check_edit_distance);
  report(all, "qa-gate", check_qa_gate);
  report(all, "speaker-identification", check_speaker_identification);
  report(all, "voice-library", check_voice_library);
  report(all, "partition", check_partition);
  report(all, "watermark", check_watermark);
  report(all, "snr-mixing", check_snr);
  report(all, "determinism", [&] {
    second = run_demo(dir / "run2");
    return check_determinism(first, second);
  });
  return all ? 0 : 1;
}
