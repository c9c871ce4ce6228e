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

#include "corpus/store.hpp"

#include "corpus/metadata.hpp"
#include "util/error.hpp"

namespace dialogsynth::corpus {

std::vector<DialogueRecord> CorpusStore::load() const {
  if (!std::filesystem::exists(metadata_path())) {
    throw MissingInputError(metadata_path().string());
  }
  return load_metadata(metadata_path());
}

void CorpusStore::save(std::span<const DialogueRecord> records) const {
  save_metadata(metadata_path(), records);
}

std::vector<std::string> CorpusStore::missing_audio(
    std::span<const DialogueRecord> records) const {
  std::vector<std::string> missing;
  for (const auto& r : records) {
    for (const auto& t : r.dialog) {
      if (!std::filesystem::is_regular_file(resolve(t))) {
        missing.push_back(t.audio_path);
      }
    }
  }
  return missing;
}

}  // namespace dialogsynth::corpus
