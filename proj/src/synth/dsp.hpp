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

#include "synth/waveform.hpp"

namespace dialogsynth::dsp {

double mean_power(std::span<const float> x);
double rms_db(std::span<const float> x);

// Gain g such that P_signal / (g^2 * P_noise) = 10^(snr_db / 10).
double noise_gain(double signal_power, double noise_power, double snr_db);

// signal + g * noise, with noise looped or truncated to the signal length.
// Throws PreconditionError on differing sample rates or zero-power noise.
Waveform mix_noise(const Waveform& signal, const Waveform& noise, double snr_db);

// noise looped or truncated to n samples.
std::vector<float> fit_length(std::span<const float> noise, std::size_t n);

}  // namespace dialogsynth::dsp
