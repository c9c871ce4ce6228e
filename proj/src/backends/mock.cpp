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

#include "backends/mock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "json.hpp"
#include "synth/wav.hpp"
#include "util/error.hpp"
#include "util/random.hpp"
#include "util/unicode.hpp"

namespace dialogsynth::backends {

namespace {

constexpr double kToneAmplitude = 0.5;
constexpr double kMinFrequency = 220.0;
constexpr double kFrequencyStep = 2.0;
constexpr double kCoarseStep = 10.0;
constexpr double kRefineRadius = 12.0;

double residue_frequency(unsigned r) { return kMinFrequency + kFrequencyStep * r; }

double goertzel_power(std::span<const double> x, double omega) {
  const double coeff = 2.0 * std::cos(omega);
  double s1 = 0.0, s2 = 0.0;
  for (double v : x) {
    const double s = v + coeff * s1 - s2;
    s2 = s1;
    s1 = s;
  }
  return s1 * s1 + s2 * s2 - coeff * s1 * s2;
}

// Energy of the least-squares projection of x onto span{cos wn, sin wn}.
double projection_energy(std::span<const float> x, double omega) {
  const std::complex<double> step = std::polar(1.0, omega);
  std::complex<double> z(1.0, 0.0);
  double xc = 0.0, xs = 0.0, cc = 0.0, ss = 0.0, cs = 0.0;
  for (float v : x) {
    const double c = z.real(), s = z.imag();
    xc += v * c;
    xs += v * s;
    cc += c * c;
    ss += s * s;
    cs += c * s;
    z *= step;
  }
  const double det = cc * ss - cs * cs;
  if (det <= 1e-12) return 0.0;
  return (xc * xc * ss - 2.0 * xc * xs * cs + xs * xs * cc) / det;
}

}  // namespace

double tone_frequency(char32_t cp) {
  return residue_frequency(static_cast<unsigned>(cp) % kToneAlphabet);
}

std::size_t tone_boundary(std::size_t k, int sample_rate) {
  return (k * static_cast<std::size_t>(sample_rate) + 10) / 20;
}

char32_t decode_residue(unsigned residue, Language language) {
  residue %= kToneAlphabet;
  return language == Language::kZh ? kMockCjkBase + residue : residue;
}

unsigned estimate_residue(std::span<const float> segment, int sample_rate) {
  const int decim = std::max(1, sample_rate / 5000);
  std::vector<double> coarse_signal;
  coarse_signal.reserve(segment.size() / static_cast<std::size_t>(decim) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(decim) <= segment.size();
       i += static_cast<std::size_t>(decim)) {
    double acc = 0.0;
    for (int d = 0; d < decim; ++d) acc += segment[i + static_cast<std::size_t>(d)];
    coarse_signal.push_back(acc / decim);
  }
  const double coarse_rate = static_cast<double>(sample_rate) / decim;
  const double max_frequency = residue_frequency(kToneAlphabet - 1);
  double best_f = kMinFrequency;
  double best_p = -1.0;
  for (double f = kMinFrequency; f <= max_frequency + kCoarseStep; f += kCoarseStep) {
    const double p =
        goertzel_power(coarse_signal, 2.0 * std::numbers::pi * f / coarse_rate);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  const double lo = std::max(0.0, std::ceil((best_f - kRefineRadius - kMinFrequency) / kFrequencyStep));
  const double hi = std::min<double>(kToneAlphabet - 1,
                                     std::floor((best_f + kRefineRadius - kMinFrequency) / kFrequencyStep));
  unsigned best_r = static_cast<unsigned>(lo);
  double best_e = -1.0;
  for (auto r = static_cast<unsigned>(lo); r <= static_cast<unsigned>(hi); ++r) {
    const double e = projection_energy(
        segment, 2.0 * std::numbers::pi * residue_frequency(r) / sample_rate);
    if (e > best_e) {
      best_e = e;
      best_r = r;
    }
  }
  return best_r;
}

std::uint64_t audio_fingerprint(const Waveform& audio, std::uint64_t seed,
                                std::size_t max_samples) {
  const std::size_t n = std::min(max_samples, audio.samples.size());
  std::vector<std::uint8_t> bytes;
  bytes.reserve(2 * n + 4);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = static_cast<std::uint16_t>(wav::quantize(audio.samples[i]));
    bytes.push_back(static_cast<std::uint8_t>(q & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>(q >> 8));
  }
  return hash_combine(stable_hash(bytes, seed),
                      static_cast<std::uint64_t>(audio.sample_rate));
}

// ---------------------------------------------------------------------------
// Chat: scripted fixtures first, then a template-aware deterministic fill.

namespace {

// Common characters inside U+4E00..U+4FFF so Chinese mock text survives the
// tone codec.
constexpr std::u32string_view kMockHan =
    U"一七万三上下不与专世东两个中为主么义之也习书了事二于五井些交产京人今他以们件任份休众会传但位住体何作你使例便信";

constexpr std::array<std::string_view, 10> kDigitWords = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"};

constexpr std::array<std::string_view, 8> kAnswerSentences = {
    "That is a great question and I am happy to help.",
    "The short answer is that it depends on a few simple things.",
    "Most people find it easiest to start small and build from there.",
    "It helps to take it one step at a time and stay patient.",
    "Many experts agree that a steady routine makes a real difference.",
    "You can usually find good advice from people who have done it before.",
    "Keep in mind that every situation is a little different.",
    "I hope that gives you a clear picture of the basics.",
};

bool has_han(std::string_view s) {
  for (char32_t cp : unicode::decode_utf8(s)) {
    if (unicode::is_han(cp)) return true;
  }
  return false;
}

std::string payload_after(std::string_view prompt, std::string_view marker) {
  const auto at = prompt.find(marker);
  if (at == std::string_view::npos) return {};
  std::string_view rest = prompt.substr(at + marker.size());
  const auto end = rest.find("\n\n");
  return std::string(rest.substr(0, end));
}

bool contains_any(std::string_view text, std::initializer_list<std::string_view> words) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto w : words) {
    if (lower.find(w) != std::string::npos) return true;
  }
  return false;
}

std::string han_text(Rng& rng, std::size_t min_len, std::size_t max_len) {
  const std::size_t n = min_len + rng.index(max_len - min_len + 1);
  std::u32string out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(kMockHan[rng.index(kMockHan.size())]);
  return unicode::encode_utf8(out);
}

// Strips unpronounceable characters and spells digits one by one.
std::string spoken_english(std::string_view text) {
  std::string out;
  for (char32_t cp : unicode::decode_utf8(text)) {
    if (cp >= U'0' && cp <= U'9') {
      out += ' ';
      out += kDigitWords[cp - U'0'];
      out += ' ';
    } else if (cp < 0x80 && (std::isalpha(static_cast<int>(cp)) || cp == U' ' ||
                             cp == U',' || cp == U'.' || cp == U'?' ||
                             cp == U'!' || cp == U'\'' || cp == U'-')) {
      out += static_cast<char>(cp);
    } else {
      out += ' ';
    }
  }
  std::string collapsed;
  for (const auto& w : unicode::split_whitespace(out)) {
    if (w.find("http") != std::string::npos || w.find("www.") != std::string::npos) continue;
    if (!collapsed.empty()) collapsed += ' ';
    collapsed += w;
  }
  return collapsed;
}

std::string strip_terminal(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '?' || s.back() == '!' ||
                        s.back() == ' ' || s.back() == ':')) {
    s.pop_back();
  }
  return s;
}

std::string bool_reply(std::string_view key, bool value) {
  nlohmann::ordered_json j;
  j[std::string(key)] = value;
  return j.dump();
}

}  // namespace

std::string MockChat::complete(std::string_view prompt, const ChatParams&) {
  if (auto it = config_.chat_script.find(std::string(prompt));
      it != config_.chat_script.end()) {
    return it->second;
  }
  Rng rng(stable_hash(prompt, config_.seed));

  if (prompt.find("##Information Piece: ") != std::string_view::npos) {
    const std::string piece = payload_after(prompt, "##Information Piece: ");
    if (unicode::trim(piece).empty()) return "";
    if (has_han(piece)) return han_text(rng, 8, 14);
    return "What should I know about " + strip_terminal(unicode::trim(piece)) + "?";
  }
  if (prompt.find("is_suitable_for_speech") != std::string_view::npos) {
    const std::string item = payload_after(prompt, "##Instruction: ");
    return bool_reply("is_suitable_for_speech",
                      !contains_any(item, {"poem", "essay", "lyrics", "email",
                                           "song", "code", "article about",
                                           "诗", "作文"}));
  }
  if (prompt.find("clear_enough") != std::string_view::npos) {
    const std::string item = payload_after(prompt, "##Instruction: ");
    return bool_reply("clear_enough",
                      !contains_any(item, {"this article", "the above", "this text",
                                           "this passage", "这篇"}));
  }
  if (prompt.find("is_safe") != std::string_view::npos) {
    const std::string item = payload_after(prompt, "##Instruction: ");
    return bool_reply("is_safe", !contains_any(item, {"bomb", "weapon", "poison",
                                                      "steal", "炸弹"}));
  }
  if (prompt.find("##Command: ") != std::string_view::npos) {
    const std::string command = payload_after(prompt, "##Command: ");
    nlohmann::ordered_json j;
    if (has_han(command)) {
      j["instruction"] = han_text(rng, 20, 30);
      j["response"] = han_text(rng, 40, 80);
    } else {
      std::string instruction = strip_terminal(spoken_english(command));
      j["instruction"] = instruction + "?";
      std::string response = "Sure.";
      const std::size_t sentences = 2 + rng.index(3);
      for (std::size_t i = 0; i < sentences; ++i) {
        response += ' ';
        response += kAnswerSentences[rng.index(kAnswerSentences.size())];
      }
      j["response"] = response;
    }
    return j.dump();
  }
  if (prompt.find("### [Instruction]: ") != std::string_view::npos) {
    nlohmann::ordered_json j;
    j["content"] = 3 + static_cast<int>(rng.index(3));
    j["style"] = 3 + static_cast<int>(rng.index(3));
    return j.dump();
  }
  return "OK";
}

// ---------------------------------------------------------------------------

Waveform MockTts::synthesize(std::string_view text, const Voice&, int sample_rate) {
  const std::u32string cps = unicode::decode_utf8(text);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(tone_boundary(cps.size(), sample_rate));
  for (std::size_t k = 0; k < cps.size(); ++k) {
    const double omega = 2.0 * std::numbers::pi * tone_frequency(cps[k]) / sample_rate;
    const std::size_t begin = tone_boundary(k, sample_rate);
    const std::size_t end = tone_boundary(k + 1, sample_rate);
    for (std::size_t i = begin; i < end; ++i) {
      w.samples[i] = static_cast<float>(
          kToneAmplitude * std::sin(omega * static_cast<double>(i - begin)));
    }
  }
  return w;
}

std::string MockAsr::transcribe(const Waveform& audio, Language language) {
  const std::size_t n = audio.samples.size();
  const auto chars = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * 20.0 / audio.sample_rate));
  Rng rng(hash_combine(config_.seed, audio_fingerprint(audio, config_.seed)));
  std::u32string out;
  for (std::size_t k = 0; k < chars; ++k) {
    const std::size_t begin = tone_boundary(k, audio.sample_rate);
    const std::size_t end = std::min(tone_boundary(k + 1, audio.sample_rate), n);
    // Draw unconditionally so corruption sets are nested across error rates.
    const double u = rng.uniform();
    const auto replacement = static_cast<unsigned>(rng.index(kToneAlphabet));
    if (begin >= end) continue;
    std::span<const float> segment(audio.samples.data() + begin, end - begin);
    double energy = 0.0;
    for (float v : segment) energy += static_cast<double>(v) * v;
    if (energy / static_cast<double>(segment.size()) < 1e-8) continue;
    unsigned residue = estimate_residue(segment, audio.sample_rate);
    if (u < config_.char_error_rate) residue = replacement;
    out.push_back(decode_residue(residue, language));
  }
  return unicode::encode_utf8(out);
}

std::vector<double> MockEmbed::embed(const Waveform& audio) {
  Rng rng(audio_fingerprint(audio, config_.seed, 2048));
  std::vector<double> v(static_cast<std::size_t>(config_.embedding_dim));
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

double MockMos::score(const Waveform& audio, MosMetric metric) {
  Rng rng(hash_combine(audio_fingerprint(audio, config_.seed),
                       metric == MosMetric::kDnsmos ? 1 : 2));
  const double u = rng.uniform();
  return metric == MosMetric::kDnsmos ? 3.0 + 0.8 * u : 3.2 + 0.6 * u;
}

}  // namespace dialogsynth::backends
