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

#include "backends/client.hpp"

#include <cmath>
#include <thread>

namespace dialogsynth::backends {

void InFlightGate::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return active_ < limit_; });
  ++active_;
  peak_ = std::max(peak_, active_);
}

void InFlightGate::release() {
  {
    std::lock_guard lock(mu_);
    --active_;
  }
  cv_.notify_one();
}

int InFlightGate::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

namespace {

struct GateGuard {
  InFlightGate& gate;
  explicit GateGuard(InFlightGate& g) : gate(g) { gate.acquire(); }
  ~GateGuard() { gate.release(); }
};

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

BackendEndpoint mock_endpoint(BackendKind kind) {
  BackendEndpoint e;
  e.kind = kind;
  e.mode = BackendMode::kMock;
  return e;
}

}  // namespace

ModelClients::ModelClients(std::shared_ptr<ChatBackend> chat,
                           std::shared_ptr<TtsBackend> tts,
                           std::shared_ptr<AsrBackend> asr,
                           std::shared_ptr<AsrBackend> asr_zh,
                           std::shared_ptr<EmbedBackend> embed,
                           std::shared_ptr<MosBackend> mos,
                           std::map<BackendKind, Slot> slots, RetryPolicy retry)
    : chat_(std::move(chat)),
      tts_(std::move(tts)),
      asr_(std::move(asr)),
      asr_zh_(std::move(asr_zh)),
      embed_(std::move(embed)),
      mos_(std::move(mos)),
      slots_(std::move(slots)),
      retry_(std::move(retry)) {
  if (!retry_.sleep) {
    retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (retry_.max_attempts < 1) throw PreconditionError("retry max_attempts must be >= 1");
  for (BackendKind k : {BackendKind::kChat, BackendKind::kTts, BackendKind::kAsr,
                        BackendKind::kAsrZh, BackendKind::kEmbed, BackendKind::kMos}) {
    if (!slots_.count(k)) slots_[k] = Slot{mock_endpoint(k), nullptr};
    gates_[k] = std::make_unique<InFlightGate>(slots_[k].endpoint.max_in_flight);
  }
}

template <typename Fn>
auto ModelClients::call(BackendKind kind, Fn&& fn) -> decltype(fn()) {
  GateGuard guard(*gates_.at(kind));
  auto backoff = retry_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    {
      std::lock_guard lock(stats_mu_);
      ++stats_[kind].calls;
    }
    try {
      return fn();
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= retry_.max_attempts) {
        std::lock_guard lock(stats_mu_);
        ++stats_[kind].failures;
        throw;
      }
    }
    {
      std::lock_guard lock(stats_mu_);
      ++stats_[kind].retries;
    }
    retry_.sleep(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long>(static_cast<double>(backoff.count()) * retry_.multiplier));
  }
}

std::string ModelClients::chat_complete(std::string_view prompt, const ChatParams& params) {
  if (prompt.empty()) throw PreconditionError("chat prompt is empty");
  return call(BackendKind::kChat, [&] { return chat_->complete(prompt, params); });
}

Waveform ModelClients::synthesize(std::string_view text, const Voice& voice,
                                  int sample_rate) {
  if (text.empty()) throw PreconditionError("tts text is empty");
  if (sample_rate <= 0) throw PreconditionError("tts sample rate must be positive");
  if (voice.embedding.empty() || std::abs(norm(voice.embedding) - 1.0) > 1e-6) {
    throw PreconditionError("voice '" + voice.speaker_id + "' embedding is not unit norm");
  }
  Waveform w = call(BackendKind::kTts, [&] { return tts_->synthesize(text, voice, sample_rate); });
  if (w.sample_rate != sample_rate) {
    throw BackendError(BackendError::Kind::kContract,
                       "tts returned " + std::to_string(w.sample_rate) + " Hz, asked for " +
                           std::to_string(sample_rate));
  }
  if (w.samples.empty()) {
    throw BackendError(BackendError::Kind::kContract, "tts returned empty audio");
  }
  return w;
}

std::string ModelClients::transcribe(const Waveform& audio, Language language) {
  if (audio.duration() < kMinAsrSeconds) {
    throw PreconditionError("asr input shorter than 50 ms");
  }
  if (language == Language::kZh && asr_zh_) {
    return call(BackendKind::kAsrZh, [&] { return asr_zh_->transcribe(audio, language); });
  }
  return call(BackendKind::kAsr, [&] { return asr_->transcribe(audio, language); });
}

std::vector<double> ModelClients::embed_speaker(const Waveform& audio) {
  if (audio.samples.empty()) throw PreconditionError("embedding input is empty");
  std::vector<double> e = call(BackendKind::kEmbed, [&] { return embed_->embed(audio); });
  const double n = norm(e);
  if (e.empty() || !(n > 0.0) || !std::isfinite(n)) {
    throw BackendError(BackendError::Kind::kContract, "embedding is zero or not finite");
  }
  for (double& x : e) x /= n;
  return e;
}

double ModelClients::score_mos(const Waveform& audio, MosMetric metric) {
  if (audio.duration() < kMinMosSeconds) {
    throw PreconditionError("mos input shorter than 1 s");
  }
  const double s = call(BackendKind::kMos, [&] { return mos_->score(audio, metric); });
  if (!(s >= 1.0 && s <= 5.0)) {
    throw BackendError(BackendError::Kind::kContract,
                       "mos score " + std::to_string(s) + " outside [1, 5]");
  }
  return s;
}

void ModelClients::check_health() {
  for (auto& [kind, slot] : slots_) {
    if (!slot.transport) continue;
    try {
      slot.transport->health();
    } catch (const Error& e) {
      throw Error(ErrorCode::kBackendUnreachable,
                  std::string(to_string(kind)) + " backend at '" + slot.endpoint.address +
                      "' unreachable: " + e.what());
    }
  }
}

CallStats ModelClients::stats(BackendKind kind) const {
  std::lock_guard lock(stats_mu_);
  auto it = stats_.find(kind);
  return it == stats_.end() ? CallStats{} : it->second;
}

std::shared_ptr<Transport> make_transport(const BackendEndpoint& endpoint) {
  validate(endpoint);
  switch (endpoint.mode) {
    case BackendMode::kHttp:
      return std::make_shared<HttpTransport>(endpoint.address, endpoint.timeout_seconds,
                                             endpoint.bearer_token);
    case BackendMode::kSubprocess:
      return std::make_shared<SubprocessTransport>(endpoint.address,
                                                   endpoint.timeout_seconds);
    case BackendMode::kMock:
      break;
  }
  return nullptr;
}

std::unique_ptr<ModelClients> make_clients(const std::vector<BackendEndpoint>& endpoints,
                                           const MockConfig& mock, RetryPolicy retry) {
  std::map<BackendKind, ModelClients::Slot> slots;
  for (const BackendEndpoint& e : endpoints) {
    validate(e);
    if (slots.count(e.kind)) {
      throw PreconditionError("duplicate endpoint for " + std::string(to_string(e.kind)));
    }
    slots[e.kind] = {e, make_transport(e)};
  }
  auto transport = [&](BackendKind k) -> std::shared_ptr<Transport> {
    auto it = slots.find(k);
    return it == slots.end() ? nullptr : it->second.transport;
  };
  std::shared_ptr<ChatBackend> chat;
  std::shared_ptr<TtsBackend> tts;
  std::shared_ptr<AsrBackend> asr;
  std::shared_ptr<EmbedBackend> embed;
  std::shared_ptr<MosBackend> mos;
  if (auto t = transport(BackendKind::kChat)) chat = std::make_shared<RemoteChat>(t);
  else chat = std::make_shared<MockChat>(mock);
  if (auto t = transport(BackendKind::kTts)) tts = std::make_shared<RemoteTts>(t);
  else tts = std::make_shared<MockTts>();
  if (auto t = transport(BackendKind::kAsr)) asr = std::make_shared<RemoteAsr>(t);
  else asr = std::make_shared<MockAsr>(mock);
  std::shared_ptr<AsrBackend> asr_zh;
  if (auto t = transport(BackendKind::kAsrZh)) asr_zh = std::make_shared<RemoteAsr>(t);
  if (auto t = transport(BackendKind::kEmbed)) embed = std::make_shared<RemoteEmbed>(t);
  else embed = std::make_shared<MockEmbed>(mock);
  if (auto t = transport(BackendKind::kMos)) mos = std::make_shared<RemoteMos>(t);
  else mos = std::make_shared<MockMos>(mock);
  return std::make_unique<ModelClients>(chat, tts, asr, asr_zh, embed, mos, std::move(slots),
                                        std::move(retry));
}

}  // namespace dialogsynth::backends
