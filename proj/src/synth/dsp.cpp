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

#include "synth/dsp.hpp"

#include <cmath>

#include "util/error.hpp"

namespace dialogsynth::dsp {

double mean_power(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return acc / static_cast<double>(x.size());
}

double rms_db(std::span<const float> x) {
  return 10.0 * std::log10(mean_power(x));
}

double noise_gain(double signal_power, double noise_power, double snr_db) {
  return std::sqrt(signal_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
}

std::vector<float> fit_length(std::span<const float> noise, std::size_t n) {
  std::vector<float> out(n);
  if (noise.empty()) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = noise[i % noise.size()];
  return out;
}

Waveform mix_noise(const Waveform& signal, const Waveform& noise, double snr_db) {
  if (signal.sample_rate != noise.sample_rate) {
    throw PreconditionError("signal and noise sample rates differ");
  }
  const std::vector<float> fitted = fit_length(noise.samples, signal.samples.size());
  const double pn = mean_power(fitted);
  if (!(pn > 0.0)) throw PreconditionError("noise has zero power");
  const double g = noise_gain(mean_power(signal.samples), pn, snr_db);
  Waveform out{signal.samples, signal.sample_rate};
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = static_cast<float>(out.samples[i] + g * fitted[i]);
  }
  return out;
}

}  // namespace dialogsynth::dsp
