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

#include <filesystem>
#include <string>
#include <string_view>

#include "synth/waveform.hpp"

namespace dialogsynth::wav {

// 16-bit little-endian PCM RIFF. Samples are quantized as
// clamp(round(x * 32768), -32768, 32767) and decoded as q / 32768.
std::string encode(const Waveform& w);
// Both channels must share length and rate.
std::string encode_stereo(const Waveform& left, const Waveform& right);

// Accepts mono PCM16 only; unknown chunks are skipped. Throws ParseError for
// malformed headers and PreconditionError for other encodings.
Waveform decode(std::string_view bytes);

Waveform read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Waveform& w);

std::int16_t quantize(float x);

}  // namespace dialogsynth::wav
