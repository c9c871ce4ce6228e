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

#include <memory>
#include <string>

#include "backends/types.hpp"

namespace dialogsynth::backends {

// HTTP front-end for MockService speaking the wire protocol. Bodies that are
// not JSON get 400; unknown paths get 404.
class MockHttpServer {
 public:
  explicit MockHttpServer(MockConfig config);
  ~MockHttpServer();
  MockHttpServer(const MockHttpServer&) = delete;
  MockHttpServer& operator=(const MockHttpServer&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the bound port.
  // Throws IoError if binding fails.
  int bind(const std::string& host, int port);
  // Serves until stop(); blocks the calling thread.
  void serve();
  // bind() plus serve() on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dialogsynth::backends
