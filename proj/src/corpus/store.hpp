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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "corpus/types.hpp"

namespace dialogsynth::corpus {

// A corpus on disk: <root>/metadata.json plus per-dialogue audio
// directories that the turn audio_path fields resolve against.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path metadata_path() const { return root_ / "metadata.json"; }
  std::filesystem::path resolve(const TurnRecord& turn) const {
    return root_ / turn.audio_path;
  }

  std::vector<DialogueRecord> load() const;
  void save(std::span<const DialogueRecord> records) const;

  // audio_path values that do not name an existing file.
  std::vector<std::string> missing_audio(
      std::span<const DialogueRecord> records) const;

 private:
  std::filesystem::path root_;
};

}  // namespace dialogsynth::corpus
