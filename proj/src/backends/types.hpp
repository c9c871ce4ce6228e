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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "util/error.hpp"

namespace dialogsynth::backends {

// kAsrZh optionally routes Chinese transcription to its own endpoint;
// without one, kAsr serves both languages.
enum class BackendKind { kChat, kTts, kAsr, kAsrZh, kEmbed, kMos };
enum class BackendMode { kHttp, kSubprocess, kMock };

std::string_view to_string(BackendKind kind);
std::string_view to_string(BackendMode mode);
BackendKind parse_kind(std::string_view s);
// Accepts "http", "subprocess" and "builtin-mock".
BackendMode parse_mode(std::string_view s);

struct BackendEndpoint {
  BackendKind kind = BackendKind::kChat;
  BackendMode mode = BackendMode::kMock;
  std::string address;  // base URL or command line
  double timeout_seconds = 60.0;
  int max_in_flight = 4;
  std::string bearer_token;  // passed through as Authorization header
};

// Throws PreconditionError if max_in_flight < 1 or a non-mock endpoint has
// no address.
void validate(const BackendEndpoint& endpoint);

struct MockConfig {
  std::uint64_t seed = 0;
  // Per-character substitution probability applied by the mock ASR.
  double char_error_rate = 0.0;
  // Exact prompt -> reply fixtures consulted before template filling.
  std::map<std::string, std::string> chat_script;
  int embedding_dim = 256;
};

struct ChatParams {
  double temperature = 0.7;
  int max_tokens = 512;
};

enum class MosMetric { kDnsmos, kUtmos };
std::string_view to_string(MosMetric metric);
MosMetric parse_metric(std::string_view s);

struct Voice {
  std::string speaker_id;
  std::vector<double> embedding;
};

class BackendError : public Error {
 public:
  enum class Kind { kTimeout, kTransport, kFailure, kContract };

  BackendError(Kind kind, const std::string& what)
      : Error(ErrorCode::kBackend, what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }
  bool retryable() const noexcept {
    return kind_ == Kind::kTimeout || kind_ == Kind::kTransport;
  }

 private:
  Kind kind_;
};

}  // namespace dialogsynth::backends
