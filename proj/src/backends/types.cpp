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

#include "backends/types.hpp"

namespace dialogsynth::backends {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kChat: return "chat";
    case BackendKind::kTts: return "tts";
    case BackendKind::kAsr: return "asr";
    case BackendKind::kAsrZh: return "asr_zh";
    case BackendKind::kEmbed: return "embed";
    case BackendKind::kMos: return "mos";
  }
  return "?";
}

std::string_view to_string(BackendMode mode) {
  switch (mode) {
    case BackendMode::kHttp: return "http";
    case BackendMode::kSubprocess: return "subprocess";
    case BackendMode::kMock: return "builtin-mock";
  }
  return "?";
}

BackendKind parse_kind(std::string_view s) {
  for (auto k : {BackendKind::kChat, BackendKind::kTts, BackendKind::kAsr,
                 BackendKind::kAsrZh, BackendKind::kEmbed, BackendKind::kMos}) {
    if (s == to_string(k)) return k;
  }
  throw PreconditionError("unknown backend kind '" + std::string(s) + "'");
}

BackendMode parse_mode(std::string_view s) {
  if (s == "http") return BackendMode::kHttp;
  if (s == "subprocess") return BackendMode::kSubprocess;
  if (s == "builtin-mock" || s == "mock") return BackendMode::kMock;
  throw PreconditionError("unknown backend mode '" + std::string(s) + "'");
}

void validate(const BackendEndpoint& e) {
  if (e.max_in_flight < 1) {
    throw PreconditionError(std::string(to_string(e.kind)) +
                            " endpoint: max_in_flight must be >= 1");
  }
  if (e.mode != BackendMode::kMock && e.address.empty()) {
    throw PreconditionError(std::string(to_string(e.kind)) +
                            " endpoint: address required for " +
                            std::string(to_string(e.mode)) + " mode");
  }
  if (!(e.timeout_seconds > 0.0)) {
    throw PreconditionError(std::string(to_string(e.kind)) +
                            " endpoint: timeout must be > 0");
  }
}

std::string_view to_string(MosMetric metric) {
  return metric == MosMetric::kDnsmos ? "dnsmos" : "utmos";
}

MosMetric parse_metric(std::string_view s) {
  if (s == "dnsmos") return MosMetric::kDnsmos;
  if (s == "utmos") return MosMetric::kUtmos;
  throw PreconditionError("unknown MOS metric '" + std::string(s) + "'");
}

}  // namespace dialogsynth::backends
