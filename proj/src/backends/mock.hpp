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

// Deterministic stand-ins for the five model kinds. Every output is a pure
// function of (MockConfig, inputs), so runs reproduce byte-for-byte.
//
// Tone codec shared by the TTS and ASR mocks: character c becomes a 50 ms
// sine at 220 + 2 * (codepoint(c) mod 512) Hz, amplitude 0.5, phase reset per
// character. Segment k spans samples [b(k), b(k+1)) with
// b(k) = floor(k * rate / 20 + 1/2). The ASR mock recovers the residue per
// segment and maps it back to a codepoint: the residue itself for English,
// U+4E00 + residue for Chinese. Characters outside those ranges collide.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "backends/backend.hpp"

namespace dialogsynth::backends {

inline constexpr double kToneSeconds = 0.05;
inline constexpr int kToneAlphabet = 512;
inline constexpr char32_t kMockCjkBase = 0x4E00;

double tone_frequency(char32_t cp);
std::size_t tone_boundary(std::size_t k, int sample_rate);
char32_t decode_residue(unsigned residue, Language language);
// Residue whose tone best explains the segment (least-squares sinusoid fit).
unsigned estimate_residue(std::span<const float> segment, int sample_rate);

class MockChat final : public ChatBackend {
 public:
  explicit MockChat(MockConfig config) : config_(std::move(config)) {}
  std::string complete(std::string_view prompt, const ChatParams& params) override;

 private:
  MockConfig config_;
};

class MockTts final : public TtsBackend {
 public:
  Waveform synthesize(std::string_view text, const Voice& voice,
                      int sample_rate) override;
};

class MockAsr final : public AsrBackend {
 public:
  explicit MockAsr(MockConfig config) : config_(std::move(config)) {}
  std::string transcribe(const Waveform& audio, Language language) override;

 private:
  MockConfig config_;
};

class MockEmbed final : public EmbedBackend {
 public:
  explicit MockEmbed(MockConfig config) : config_(std::move(config)) {}
  std::vector<double> embed(const Waveform& audio) override;

 private:
  MockConfig config_;
};

class MockMos final : public MosBackend {
 public:
  explicit MockMos(MockConfig config) : config_(std::move(config)) {}
  double score(const Waveform& audio, MosMetric metric) override;

 private:
  MockConfig config_;
};

// Hash of the PCM16 rendering of the first `max_samples` samples.
std::uint64_t audio_fingerprint(const Waveform& audio, std::uint64_t seed,
                                std::size_t max_samples = SIZE_MAX);

}  // namespace dialogsynth::backends
