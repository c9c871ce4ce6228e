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

#include <string>
#include <string_view>
#include <vector>

#include "backends/types.hpp"
#include "corpus/types.hpp"
#include "synth/waveform.hpp"

namespace dialogsynth::backends {

// Raw model contracts. Implementations may throw BackendError; argument and
// result checking lives in ModelClients.

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(std::string_view prompt, const ChatParams& params) = 0;
};

class TtsBackend {
 public:
  virtual ~TtsBackend() = default;
  virtual Waveform synthesize(std::string_view text, const Voice& voice,
                              int sample_rate) = 0;
};

class AsrBackend {
 public:
  virtual ~AsrBackend() = default;
  virtual std::string transcribe(const Waveform& audio, Language language) = 0;
};

class EmbedBackend {
 public:
  virtual ~EmbedBackend() = default;
  virtual std::vector<double> embed(const Waveform& audio) = 0;
};

class MosBackend {
 public:
  virtual ~MosBackend() = default;
  virtual double score(const Waveform& audio, MosMetric metric) = 0;
};

}  // namespace dialogsynth::backends
