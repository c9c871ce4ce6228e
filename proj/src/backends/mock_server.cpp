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

#include "backends/mock_server.hpp"

#include <thread>

#include "backends/wire.hpp"
#include "httplib.h"

namespace dialogsynth::backends {

using nlohmann::json;

struct MockHttpServer::Impl {
  explicit Impl(MockConfig config) : service(std::move(config)) {}
  MockService service;
  httplib::Server server;
  std::thread thread;
};

namespace {

void reply(httplib::Response& res, const WireReply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

MockHttpServer::MockHttpServer(MockConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  Impl* impl = impl_.get();
  impl->server.Get(".*", [impl](const httplib::Request& req, httplib::Response& res) {
    if (req.path == "/healthz") return reply(res, {200, impl->service.manifest()});
    reply(res, {404, json{{"error", "no such endpoint: " + req.path}}});
  });
  impl->server.Post(".*", [impl](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return reply(res, {400, json{{"error", "body is not JSON"}}});
    reply(res, impl->service.handle(req.path, body));
  });
}

MockHttpServer::~MockHttpServer() { stop(); }

int MockHttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void MockHttpServer::serve() { impl_->server.listen_after_bind(); }

int MockHttpServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  impl_->thread = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return bound;
}

void MockHttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace dialogsynth::backends
