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

// Metadata codec. The on-disk document is one JSON list of dialogue objects
// using the field names and nesting of the published dialogue format:
//
//   {"id": ..., "speaker": {"SPK1486m": {"role": "user", "gender": "male"},
//    ...}, "audio": {"channel": 2, "duration": ..., "sample_rate": 22050},
//    "channel": [{"channel_index": 0, "language": "en"}, ...],
//    "dialog": [{"channel": 0, "speaker": ..., "text": ..., "start": ...,
//                "end": ..., "audio_path": ...}, ...]}
//
// Records are written one per line so the list can be produced and consumed
// incrementally.

#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpus/types.hpp"
#include "json.hpp"

namespace dialogsynth::corpus {

nlohmann::ordered_json record_to_json(const DialogueRecord& record);
// Structural decode only. Throws ValidationError naming the field.
DialogueRecord record_from_json(const nlohmann::ordered_json& j);

std::string encode_record(const DialogueRecord& record);
std::string encode_metadata(std::span<const DialogueRecord> records);

// Parses and fully validates. ParseError carries the byte offset;
// ValidationError names the dialogue id and field.
std::vector<DialogueRecord> decode_metadata(std::string_view bytes);

using RecordSink = std::function<void(DialogueRecord&&)>;
void for_each_record(std::istream& in, const RecordSink& sink);
void for_each_record(const std::filesystem::path& path, const RecordSink& sink);
std::vector<DialogueRecord> load_metadata(const std::filesystem::path& path);

// Appends records to a metadata file; the file only appears under its final
// name once finish() succeeds.
class MetadataWriter {
 public:
  explicit MetadataWriter(std::filesystem::path path);
  ~MetadataWriter();
  MetadataWriter(const MetadataWriter&) = delete;
  MetadataWriter& operator=(const MetadataWriter&) = delete;

  void append(const DialogueRecord& record);
  void finish();
  std::size_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_path_;
  std::ofstream out_;
  std::size_t count_ = 0;
  bool finished_ = false;
};

void save_metadata(const std::filesystem::path& path,
                   std::span<const DialogueRecord> records);

}  // namespace dialogsynth::corpus
