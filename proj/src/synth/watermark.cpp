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

#include "synth/watermark.hpp"

#include <algorithm>
#include <cmath>

#include "synth/dsp.hpp"
#include "util/error.hpp"
#include "util/random.hpp"

namespace dialogsynth::synth {

namespace {

void require_length(const Waveform& audio, const WatermarkKey& key) {
  if (audio.sample_rate <= 0) throw PreconditionError("sample rate must be > 0");
  if (audio.duration() < key.min_detect_seconds) {
    throw PreconditionError("audio shorter than " +
                            std::to_string(key.min_detect_seconds) +
                            " s cannot carry a watermark");
  }
}

std::vector<double> apply_fir(std::span<const double> a, std::span<const float> x) {
  const std::size_t p = a.size() - 1;
  std::vector<double> out;
  if (x.size() <= p) return out;
  out.reserve(x.size() - p);
  for (std::size_t n = p; n < x.size(); ++n) {
    double acc = x[n];
    for (std::size_t k = 1; k <= p; ++k) acc += a[k] * x[n - k];
    out.push_back(acc);
  }
  return out;
}

}  // namespace

std::vector<float> pn_sequence(std::uint64_t key, std::size_t n) {
  Rng rng(hash_combine(key, 0x57a7e12a));
  std::vector<float> chips(n);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) bits = rng.next();
    chips[i] = (bits >> (i % 64)) & 1 ? 1.0f : -1.0f;
  }
  return chips;
}

std::vector<double> lpc_error_filter(std::span<const float> x, int order) {
  const auto p = static_cast<std::size_t>(std::max(order, 0));
  std::vector<double> r(p + 1, 0.0);
  for (std::size_t k = 0; k <= p; ++k) {
    for (std::size_t n = k; n < x.size(); ++n) {
      r[k] += static_cast<double>(x[n]) * x[n - k];
    }
  }
  std::vector<double> a(p + 1, 0.0);
  a[0] = 1.0;
  if (!(r[0] > 0.0)) return a;
  // Slight diagonal loading keeps the recursion stable on pure tones.
  r[0] *= 1.0 + 1e-9;
  double err = r[0];
  std::vector<double> prev(p + 1);
  for (std::size_t i = 1; i <= p; ++i) {
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc += a[j] * r[i - j];
    const double k = -acc / err;
    prev = a;
    for (std::size_t j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
    a[i] = k;
    err *= 1.0 - k * k;
    if (!(err > 0.0)) break;
  }
  return a;
}

Waveform SpreadSpectrumWatermarker::embed(const Waveform& audio,
                                          const WatermarkKey& key) const {
  if (!(key.strength_db < 0.0)) {
    throw PreconditionError("watermark strength must be below 0 dB");
  }
  require_length(audio, key);
  const double host_power = dsp::mean_power(audio.samples);
  if (!(host_power > 0.0)) {
    throw PreconditionError("silent host: watermark power undefined");
  }
  const double gain = std::sqrt(host_power * std::pow(10.0, key.strength_db / 10.0));
  const std::vector<float> chips = pn_sequence(key.key, audio.samples.size());
  Waveform out{audio.samples, audio.sample_rate};
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double v = out.samples[i] + gain * chips[i];
    out.samples[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return out;
}

WatermarkDetection SpreadSpectrumWatermarker::detect(const Waveform& audio,
                                                     const WatermarkKey& key,
                                                     double threshold) const {
  require_length(audio, key);
  const std::vector<double> a = lpc_error_filter(audio.samples, lpc_order_);
  const std::vector<float> chips = pn_sequence(key.key, audio.samples.size());
  const std::vector<double> residual = apply_fir(a, audio.samples);
  const std::vector<double> reference = apply_fir(a, chips);
  double cross = 0.0, re = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    cross += residual[i] * reference[i];
    re += residual[i] * residual[i];
    rr += reference[i] * reference[i];
  }
  WatermarkDetection d;
  if (re > 0.0 && rr > 0.0) d.score = cross / std::sqrt(re * rr);
  d.detected = d.score > threshold;
  return d;
}

}  // namespace dialogsynth::synth
