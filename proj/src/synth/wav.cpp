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

#include "synth/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "util/error.hpp"
#include "util/io.hpp"

namespace dialogsynth::wav {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]);
  }
  return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::string header(std::uint16_t channels, int sample_rate,
                   std::uint32_t data_bytes) {
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * channels * 2);
  put_u16(out, static_cast<std::uint16_t>(channels * 2));
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  return out;
}

void put_sample(std::string& out, float x) {
  put_u16(out, static_cast<std::uint16_t>(quantize(x)));
}

}  // namespace

std::int16_t quantize(float x) {
  const double q = std::round(static_cast<double>(x) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0));
}

std::string encode(const Waveform& w) {
  if (w.sample_rate <= 0) throw PreconditionError("sample rate must be > 0");
  std::string out =
      header(1, w.sample_rate, static_cast<std::uint32_t>(w.samples.size() * 2));
  for (float x : w.samples) put_sample(out, x);
  return out;
}

std::string encode_stereo(const Waveform& left, const Waveform& right) {
  if (left.samples.size() != right.samples.size() ||
      left.sample_rate != right.sample_rate) {
    throw PreconditionError("stereo channels differ in length or rate");
  }
  std::string out = header(2, left.sample_rate,
                           static_cast<std::uint32_t>(left.samples.size() * 4));
  for (std::size_t i = 0; i < left.samples.size(); ++i) {
    put_sample(out, left.samples[i]);
    put_sample(out, right.samples[i]);
  }
  return out;
}

Waveform decode(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    throw ParseError("not a RIFF/WAVE file", 0);
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  Waveform w;
  while (pos + 8 <= b.size()) {
    const std::string_view id = b.substr(pos, 4);
    const std::uint32_t size = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > b.size()) {
        throw ParseError("truncated fmt chunk", pos);
      }
      const std::uint16_t format = get_u16(b, body);
      const std::uint16_t channels = get_u16(b, body + 2);
      const std::uint32_t rate = get_u32(b, body + 4);
      const std::uint16_t bits = get_u16(b, body + 14);
      if (format != 1 || bits != 16) {
        throw PreconditionError("unsupported WAV encoding (need PCM16)");
      }
      if (channels != 1) {
        throw PreconditionError("unsupported channel count " +
                                std::to_string(channels) + " (need mono)");
      }
      if (rate == 0) throw ParseError("zero sample rate", body + 4);
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("data chunk before fmt chunk", pos);
      if (body + size > b.size()) throw ParseError("truncated data chunk", pos);
      const std::size_t n = size / 2;
      w.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto q = static_cast<std::int16_t>(get_u16(b, body + 2 * i));
        w.samples[i] = static_cast<float>(q / 32768.0);
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw ParseError(have_fmt ? "missing data chunk" : "missing fmt chunk",
                   std::min(pos, b.size()));
}

Waveform read(const std::filesystem::path& path) {
  try {
    return decode(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

void write(const std::filesystem::path& path, const Waveform& w) {
  write_file(path, encode(w));
}

}  // namespace dialogsynth::wav
