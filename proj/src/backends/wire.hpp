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

// JSON wire protocol shared by every out-of-process backend.
//
//   POST /v1/chat  {prompt, temperature, max_tokens}            -> {text}
//   POST /v1/tts   {text, speaker_embedding, sample_rate}       -> {wav_base64}
//   POST /v1/asr   {wav_base64, language}                       -> {text}
//   POST /v1/embed {wav_base64}                                 -> {embedding}
//   POST /v1/mos   {wav_base64, metric}                         -> {score}
//   GET  /healthz                                               -> manifest
//
// wav payloads are complete PCM16 RIFF files. Subprocess mode exchanges one
// JSON object per line: requests {"path": ..., "body": {...}} on stdin,
// replies {"status": <http status>, "body": {...}} on stdout.

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "backends/backend.hpp"
#include "backends/mock.hpp"
#include "json.hpp"

namespace dialogsynth::backends {

struct WireReply {
  int status = 200;
  nlohmann::json body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Returns the body of a 200 reply; otherwise throws BackendError
  // (5xx and I/O errors are kTransport, timeouts kTimeout, 4xx kFailure).
  virtual nlohmann::json post(std::string_view path, const nlohmann::json& body) = 0;
  virtual nlohmann::json health() = 0;
};

class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string base_url, double timeout_seconds, std::string bearer_token);
  nlohmann::json post(std::string_view path, const nlohmann::json& body) override;
  nlohmann::json health() override;

 private:
  std::string base_url_;
  double timeout_seconds_;
  std::string bearer_token_;
};

// One long-lived child process; calls are serialized. A child that dies or
// times out is killed and respawned on the next call.
class SubprocessTransport final : public Transport {
 public:
  SubprocessTransport(std::string command, double timeout_seconds);
  ~SubprocessTransport() override;
  nlohmann::json post(std::string_view path, const nlohmann::json& body) override;
  nlohmann::json health() override;

 private:
  WireReply exchange(const nlohmann::json& request);
  void spawn();
  void kill_child();

  std::string command_;
  double timeout_seconds_;
  std::mutex mu_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
};

// Server side of the protocol backed by the deterministic mocks.
class MockService {
 public:
  explicit MockService(MockConfig config);
  WireReply handle(std::string_view path, const nlohmann::json& body);
  nlohmann::json manifest() const;

 private:
  MockConfig config_;
  MockChat chat_;
  MockTts tts_;
  MockAsr asr_;
  MockEmbed embed_;
  MockMos mos_;
};

// Transport that calls a MockService in-process; exercises the full codec.
class LoopbackTransport final : public Transport {
 public:
  explicit LoopbackTransport(std::shared_ptr<MockService> service)
      : service_(std::move(service)) {}
  nlohmann::json post(std::string_view path, const nlohmann::json& body) override;
  nlohmann::json health() override { return service_->manifest(); }

 private:
  std::shared_ptr<MockService> service_;
};

// Reads one request line per input line and writes one reply line.
void serve_stdio(MockService& service, std::istream& in, std::ostream& out);

class RemoteChat final : public ChatBackend {
 public:
  explicit RemoteChat(std::shared_ptr<Transport> t) : t_(std::move(t)) {}
  std::string complete(std::string_view prompt, const ChatParams& params) override;

 private:
  std::shared_ptr<Transport> t_;
};

class RemoteTts final : public TtsBackend {
 public:
  explicit RemoteTts(std::shared_ptr<Transport> t) : t_(std::move(t)) {}
  Waveform synthesize(std::string_view text, const Voice& voice, int sample_rate) override;

 private:
  std::shared_ptr<Transport> t_;
};

class RemoteAsr final : public AsrBackend {
 public:
  explicit RemoteAsr(std::shared_ptr<Transport> t) : t_(std::move(t)) {}
  std::string transcribe(const Waveform& audio, Language language) override;

 private:
  std::shared_ptr<Transport> t_;
};

class RemoteEmbed final : public EmbedBackend {
 public:
  explicit RemoteEmbed(std::shared_ptr<Transport> t) : t_(std::move(t)) {}
  std::vector<double> embed(const Waveform& audio) override;

 private:
  std::shared_ptr<Transport> t_;
};

class RemoteMos final : public MosBackend {
 public:
  explicit RemoteMos(std::shared_ptr<Transport> t) : t_(std::move(t)) {}
  double score(const Waveform& audio, MosMetric metric) override;

 private:
  std::shared_ptr<Transport> t_;
};

}  // namespace dialogsynth::backends
