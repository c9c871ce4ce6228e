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

#include "backends/wire.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <istream>
#include <ostream>

#include "httplib.h"
#include "synth/wav.hpp"
#include "util/io.hpp"

namespace dialogsynth::backends {

using nlohmann::json;

namespace {

BackendError status_error(int status, std::string_view path, const json& body) {
  std::string what = std::string(path) + " returned HTTP " + std::to_string(status);
  if (body.is_object() && body.contains("error") && body["error"].is_string()) {
    what += ": " + body["error"].get<std::string>();
  }
  return BackendError(status >= 500 ? BackendError::Kind::kTransport
                                    : BackendError::Kind::kFailure,
                      what);
}

json parse_body(std::string_view text, std::string_view path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw BackendError(BackendError::Kind::kContract,
                       std::string(path) + ": unparsable reply: " + e.what());
  }
}

template <typename T>
T require_field(const json& body, std::string_view key, std::string_view path) {
  auto it = body.find(std::string(key));
  if (it == body.end()) {
    throw BackendError(BackendError::Kind::kContract,
                       std::string(path) + ": reply lacks '" + std::string(key) + "'");
  }
  try {
    return it->template get<T>();
  } catch (const json::exception& e) {
    throw BackendError(BackendError::Kind::kContract,
                       std::string(path) + ": bad '" + std::string(key) + "': " + e.what());
  }
}

std::string wav_payload(const Waveform& w) { return base64_encode(wav::encode(w)); }

Waveform wav_from_payload(const std::string& b64) {
  return wav::decode(base64_decode(b64));
}

}  // namespace

// ---------------------------------------------------------------------------

HttpTransport::HttpTransport(std::string base_url, double timeout_seconds,
                             std::string bearer_token)
    : base_url_(std::move(base_url)),
      timeout_seconds_(timeout_seconds),
      bearer_token_(std::move(bearer_token)) {}

namespace {

httplib::Client make_client(const std::string& base_url, double timeout_seconds) {
  httplib::Client cli(base_url);
  const auto secs = static_cast<time_t>(timeout_seconds);
  const auto usecs =
      static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  return cli;
}

httplib::Headers auth_headers(const std::string& bearer_token) {
  httplib::Headers headers;
  if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);
  return headers;
}

BackendError transport_error(httplib::Error err, std::string_view what) {
  const bool timeout =
      err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
  return BackendError(timeout ? BackendError::Kind::kTimeout
                              : BackendError::Kind::kTransport,
                      std::string(what) + ": " + httplib::to_string(err));
}

}  // namespace

json HttpTransport::post(std::string_view path, const json& body) {
  httplib::Client cli = make_client(base_url_, timeout_seconds_);
  auto res = cli.Post(std::string(path), auth_headers(bearer_token_), body.dump(), "application/json");
  if (!res) throw transport_error(res.error(), base_url_ + std::string(path));
  if (res->status != 200) {
    // Error bodies are often not JSON (proxies, default pages).
    throw status_error(res->status, path, json::parse(res->body, nullptr, false));
  }
  return res->body.empty() ? json::object() : parse_body(res->body, path);
}

json HttpTransport::health() {
  httplib::Client cli = make_client(base_url_, timeout_seconds_);
  auto res = cli.Get("/healthz", auth_headers(bearer_token_));
  if (!res) throw transport_error(res.error(), base_url_ + "/healthz");
  if (res->status != 200) throw status_error(res->status, "/healthz", json());
  return parse_body(res->body, "/healthz");
}

// ---------------------------------------------------------------------------

SubprocessTransport::SubprocessTransport(std::string command, double timeout_seconds)
    : command_(std::move(command)), timeout_seconds_(timeout_seconds) {}

SubprocessTransport::~SubprocessTransport() { kill_child(); }

void SubprocessTransport::spawn() {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw BackendError(BackendError::Kind::kTransport,
                       std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    throw BackendError(BackendError::Kind::kTransport,
                       std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  read_buffer_.clear();
  signal(SIGPIPE, SIG_IGN);
}

void SubprocessTransport::kill_child() {
  if (pid_ <= 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGTERM);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
  to_child_ = from_child_ = -1;
}

WireReply SubprocessTransport::exchange(const json& request) {
  std::lock_guard lock(mu_);
  if (pid_ <= 0) spawn();
  const std::string line = request.dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = write(to_child_, line.data() + written, line.size() - written);
    if (n <= 0) {
      kill_child();
      throw BackendError(BackendError::Kind::kTransport, "subprocess closed its input");
    }
    written += static_cast<std::size_t>(n);
  }
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds_);
  for (;;) {
    if (auto nl = read_buffer_.find('\n'); nl != std::string::npos) {
      const std::string reply_line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      const json reply = parse_body(reply_line, "subprocess");
      WireReply out;
      out.status = reply.value("status", 500);
      out.body = reply.contains("body") ? reply["body"] : json::object();
      return out;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      kill_child();
      throw BackendError(BackendError::Kind::kTimeout, "subprocess reply timed out");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    char buf[65536];
    const ssize_t n = read(from_child_, buf, sizeof(buf));
    if (n <= 0) {
      kill_child();
      throw BackendError(BackendError::Kind::kTransport, "subprocess exited");
    }
    read_buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

json SubprocessTransport::post(std::string_view path, const json& body) {
  WireReply reply = exchange(json{{"path", path}, {"body", body}});
  if (reply.status != 200) throw status_error(reply.status, path, reply.body);
  return reply.body;
}

json SubprocessTransport::health() {
  WireReply reply = exchange(json{{"path", "/healthz"}, {"body", json::object()}});
  if (reply.status != 200) throw status_error(reply.status, "/healthz", reply.body);
  return reply.body;
}

// ---------------------------------------------------------------------------

MockService::MockService(MockConfig config)
    : config_(config), chat_(config), asr_(config), embed_(config), mos_(config) {}

json MockService::manifest() const {
  return json{{"kind", "mock"},
              {"model", "builtin-mock"},
              {"kinds", {"chat", "tts", "asr", "embed", "mos"}},
              {"capabilities", {{"languages", {"zh", "en"}}, {"sample_rates", {22050}}}}};
}

WireReply MockService::handle(std::string_view path, const json& body) {
  try {
    if (path == "/healthz") return {200, manifest()};
    if (path == "/v1/chat") {
      ChatParams params;
      params.temperature = body.value("temperature", params.temperature);
      params.max_tokens = body.value("max_tokens", params.max_tokens);
      return {200, json{{"text", chat_.complete(body.at("prompt").get<std::string>(), params)}}};
    }
    if (path == "/v1/tts") {
      Voice voice;
      voice.embedding = body.at("speaker_embedding").get<std::vector<double>>();
      const Waveform w = tts_.synthesize(body.at("text").get<std::string>(), voice,
                                         body.value("sample_rate", kDefaultSampleRate));
      return {200, json{{"wav_base64", wav_payload(w)}}};
    }
    if (path == "/v1/asr") {
      const Waveform w = wav_from_payload(body.at("wav_base64").get<std::string>());
      const Language lang = parse_language(body.at("language").get<std::string>());
      return {200, json{{"text", asr_.transcribe(w, lang)}}};
    }
    if (path == "/v1/embed") {
      const Waveform w = wav_from_payload(body.at("wav_base64").get<std::string>());
      return {200, json{{"embedding", embed_.embed(w)}}};
    }
    if (path == "/v1/mos") {
      const Waveform w = wav_from_payload(body.at("wav_base64").get<std::string>());
      const MosMetric metric = parse_metric(body.at("metric").get<std::string>());
      return {200, json{{"score", mos_.score(w, metric)}}};
    }
    return {404, json{{"error", "no such endpoint: " + std::string(path)}}};
  } catch (const json::exception& e) {
    return {400, json{{"error", e.what()}}};
  } catch (const Error& e) {
    const bool client = e.code() == ErrorCode::kPrecondition || e.code() == ErrorCode::kParse;
    return {client ? 400 : 500, json{{"error", e.what()}}};
  }
}

json LoopbackTransport::post(std::string_view path, const json& body) {
  // Serialize both directions so the loopback exercises the same bytes as
  // a real transport.
  WireReply reply = service_->handle(path, json::parse(body.dump()));
  if (reply.status != 200) throw status_error(reply.status, path, reply.body);
  return json::parse(reply.body.dump());
}

void serve_stdio(MockService& service, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    WireReply reply;
    try {
      const json request = json::parse(line);
      reply = service.handle(request.at("path").get<std::string>(),
                             request.value("body", json::object()));
    } catch (const json::exception& e) {
      reply = {400, json{{"error", e.what()}}};
    }
    out << json{{"status", reply.status}, {"body", reply.body}}.dump() << '\n';
    out.flush();
  }
}

// ---------------------------------------------------------------------------

std::string RemoteChat::complete(std::string_view prompt, const ChatParams& params) {
  const json reply = t_->post("/v1/chat", json{{"prompt", prompt},
                                               {"temperature", params.temperature},
                                               {"max_tokens", params.max_tokens}});
  return require_field<std::string>(reply, "text", "/v1/chat");
}

Waveform RemoteTts::synthesize(std::string_view text, const Voice& voice, int sample_rate) {
  const json reply = t_->post("/v1/tts", json{{"text", text},
                                              {"speaker_embedding", voice.embedding},
                                              {"sample_rate", sample_rate}});
  try {
    return wav_from_payload(require_field<std::string>(reply, "wav_base64", "/v1/tts"));
  } catch (const BackendError&) {
    throw;
  } catch (const Error& e) {
    throw BackendError(BackendError::Kind::kContract, std::string("/v1/tts: ") + e.what());
  }
}

std::string RemoteAsr::transcribe(const Waveform& audio, Language language) {
  const json reply = t_->post("/v1/asr", json{{"wav_base64", wav_payload(audio)},
                                              {"language", to_string(language)}});
  return require_field<std::string>(reply, "text", "/v1/asr");
}

std::vector<double> RemoteEmbed::embed(const Waveform& audio) {
  const json reply = t_->post("/v1/embed", json{{"wav_base64", wav_payload(audio)}});
  return require_field<std::vector<double>>(reply, "embedding", "/v1/embed");
}

double RemoteMos::score(const Waveform& audio, MosMetric metric) {
  const json reply = t_->post("/v1/mos", json{{"wav_base64", wav_payload(audio)},
                                              {"metric", to_string(metric)}});
  return require_field<double>(reply, "score", "/v1/mos");
}

}  // namespace dialogsynth::backends
