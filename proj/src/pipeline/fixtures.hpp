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

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace dialogsynth::pipeline {

struct DemoOptions {
  std::size_t instructions = 200;
  std::uint64_t seed = 7;
  std::size_t voice_count = 24;
  double char_error_rate = 0.01;
  // Partition scale for 200 instructions; other sizes scale linearly.
  double partition_scale = 1e-5;
};

// Writes a self-contained desk run: instructions.jsonl (English and Chinese,
// with some items the judges reject), clips.jsonl (planted speaker
// embeddings: twelve clean recordings split by gender plus recordings the
// identification rule must reject) and config.json. Returns the config path.
std::filesystem::path write_demo_fixtures(const std::filesystem::path& dir,
                                          const DemoOptions& options = {});

}  // namespace dialogsynth::pipeline
