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

// Mock model backend speaking the wire protocol over HTTP or stdio.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "backends/mock_server.hpp"
#include "backends/wire.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic mock model backend"};
  int port = -1;
  std::string host = "127.0.0.1";
  bool stdio = false;
  dialogsynth::backends::MockConfig config;
  app.add_option("--http", port, "Serve HTTP on this port (0 picks one)");
  app.add_option("--host", host, "HTTP bind address");
  app.add_flag("--stdio", stdio, "Serve one JSON request per stdin line");
  app.add_option("--seed", config.seed, "Mock seed");
  app.add_option("--cer", config.char_error_rate, "Mock ASR character error rate")
      ->check(CLI::Range(0.0, 1.0));
  CLI11_PARSE(app, argc, argv);

  if (stdio == (port >= 0)) {
    std::fprintf(stderr, "error: choose exactly one of --http or --stdio\n");
    return 1;
  }
  try {
    if (stdio) {
      dialogsynth::backends::MockService service(config);
      dialogsynth::backends::serve_stdio(service, std::cin, std::cout);
      return 0;
    }
    dialogsynth::backends::MockHttpServer server(config);
    const int bound = server.bind(host, port);
    std::printf("listening on %s:%d\n", host.c_str(), bound);
    std::fflush(stdout);
    server.serve();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
