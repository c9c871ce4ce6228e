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

#include <cstdint>
#include <vector>

#include "synth/waveform.hpp"

namespace dialogsynth::synth {

struct WatermarkKey {
  std::uint64_t key = 0;
  // Watermark power relative to host power; must be negative.
  double strength_db = -30.0;
  double min_detect_seconds = 1.0;
};

struct WatermarkDetection {
  bool detected = false;
  double score = 0.0;
};

inline constexpr double kDefaultDetectThreshold = 0.05;

// Pluggable watermark. Any implementation (including an external neural
// watermarker mounted behind this interface) must refuse clips shorter than
// key.min_detect_seconds.
class Watermarker {
 public:
  virtual ~Watermarker() = default;
  virtual Waveform embed(const Waveform& audio, const WatermarkKey& key) const = 0;
  virtual WatermarkDetection detect(const Waveform& audio, const WatermarkKey& key,
                                    double threshold = kDefaultDetectThreshold) const = 0;
};

// Additive spread-spectrum watermark. embed() adds a key-seeded +/-1 chip
// sequence scaled to strength_db below the host power. detect() whitens the
// received signal with a short LPC error filter estimated from the signal
// itself, applies the same filter to the chip sequence, and reports their
// normalized correlation.
class SpreadSpectrumWatermarker final : public Watermarker {
 public:
  explicit SpreadSpectrumWatermarker(int lpc_order = 16) : lpc_order_(lpc_order) {}

  Waveform embed(const Waveform& audio, const WatermarkKey& key) const override;
  WatermarkDetection detect(const Waveform& audio, const WatermarkKey& key,
                            double threshold = kDefaultDetectThreshold) const override;

 private:
  int lpc_order_;
};

std::vector<float> pn_sequence(std::uint64_t key, std::size_t n);

// Prediction-error filter coefficients a[0..order] (a[0] == 1) from the
// autocorrelation method with Levinson-Durbin recursion.
std::vector<double> lpc_error_filter(std::span<const float> x, int order);

}  // namespace dialogsynth::synth
