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

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "backends/backend.hpp"
#include "backends/wire.hpp"

namespace dialogsynth::backends {

inline constexpr double kMinAsrSeconds = 0.05;
inline constexpr double kMinMosSeconds = 1.0;

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
  // Replaceable so tests do not sleep.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Counting semaphore bounding concurrent calls to one endpoint.
class InFlightGate {
 public:
  explicit InFlightGate(int limit) : limit_(limit) {}
  void acquire();
  void release();
  int peak() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int limit_;
  int active_ = 0;
  int peak_ = 0;
};

struct CallStats {
  long calls = 0;
  long retries = 0;
  long failures = 0;
};

// Checked front-end over the five model kinds. Argument checks throw
// PreconditionError before any call; malformed results throw BackendError
// with kind kContract. Retryable errors are retried per the policy.
class ModelClients {
 public:
  struct Slot {
    BackendEndpoint endpoint;
    std::shared_ptr<Transport> transport;  // null for in-process mocks
  };

  // asr_zh may be null, in which case asr serves Chinese too.
  ModelClients(std::shared_ptr<ChatBackend> chat, std::shared_ptr<TtsBackend> tts,
               std::shared_ptr<AsrBackend> asr, std::shared_ptr<AsrBackend> asr_zh,
               std::shared_ptr<EmbedBackend> embed, std::shared_ptr<MosBackend> mos,
               std::map<BackendKind, Slot> slots, RetryPolicy retry = {});

  std::string chat_complete(std::string_view prompt, const ChatParams& params = {});
  Waveform synthesize(std::string_view text, const Voice& voice,
                      int sample_rate = kDefaultSampleRate);
  std::string transcribe(const Waveform& audio, Language language);
  std::vector<double> embed_speaker(const Waveform& audio);
  double score_mos(const Waveform& audio, MosMetric metric);

  // Probes every non-mock endpoint; throws Error(kBackendUnreachable).
  void check_health();
  CallStats stats(BackendKind kind) const;
  const RetryPolicy& retry_policy() const { return retry_; }

 private:
  template <typename Fn>
  auto call(BackendKind kind, Fn&& fn) -> decltype(fn());

  std::shared_ptr<ChatBackend> chat_;
  std::shared_ptr<TtsBackend> tts_;
  std::shared_ptr<AsrBackend> asr_;
  std::shared_ptr<AsrBackend> asr_zh_;
  std::shared_ptr<EmbedBackend> embed_;
  std::shared_ptr<MosBackend> mos_;
  std::map<BackendKind, Slot> slots_;
  std::map<BackendKind, std::unique_ptr<InFlightGate>> gates_;
  RetryPolicy retry_;
  mutable std::mutex stats_mu_;
  std::map<BackendKind, CallStats> stats_;
};

// Builds clients for the given endpoints; kinds without an endpoint use the
// built-in mock.
std::unique_ptr<ModelClients> make_clients(const std::vector<BackendEndpoint>& endpoints,
                                           const MockConfig& mock, RetryPolicy retry = {});

std::shared_ptr<Transport> make_transport(const BackendEndpoint& endpoint);

}  // namespace dialogsynth::backends
