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

#include "corpus/metadata.hpp"

#include <set>
#include <sstream>

#include "corpus/validate.hpp"
#include "util/error.hpp"
#include "util/json_scan.hpp"

namespace dialogsynth::corpus {

using nlohmann::ordered_json;

ordered_json record_to_json(const DialogueRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  ordered_json speakers = ordered_json::object();
  for (const auto& s : r.speakers) {
    ordered_json sj;
    sj["role"] = to_string(s.role);
    sj["gender"] = to_string(s.gender);
    speakers[s.id] = std::move(sj);
  }
  j["speaker"] = std::move(speakers);
  ordered_json audio;
  audio["channel"] = r.audio.channel_count;
  audio["duration"] = r.audio.duration;
  audio["sample_rate"] = r.audio.sample_rate;
  j["audio"] = std::move(audio);
  ordered_json channels = ordered_json::array();
  for (const auto& c : r.channels) {
    ordered_json cj;
    cj["channel_index"] = c.channel_index;
    cj["language"] = to_string(c.language);
    channels.push_back(std::move(cj));
  }
  j["channel"] = std::move(channels);
  ordered_json dialog = ordered_json::array();
  for (const auto& t : r.dialog) {
    ordered_json tj;
    tj["channel"] = t.channel;
    tj["speaker"] = t.speaker;
    tj["text"] = t.text;
    tj["start"] = t.start;
    tj["end"] = t.end;
    tj["audio_path"] = t.audio_path;
    dialog.push_back(std::move(tj));
  }
  j["dialog"] = std::move(dialog);
  return j;
}

namespace {

class FieldReader {
 public:
  explicit FieldReader(std::string id) : id_(std::move(id)) {}

  const ordered_json& member(const ordered_json& obj, const std::string& key,
                     const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + (path.empty() ? "" : ".") + key, "missing");
    return *it;
  }

  std::string str(const ordered_json& obj, const std::string& key,
                  const std::string& path) const {
    const ordered_json& v = member(obj, key, path);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  double number(const ordered_json& obj, const std::string& key,
                const std::string& path) const {
    const ordered_json& v = member(obj, key, path);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
  }

  int integer(const ordered_json& obj, const std::string& key,
              const std::string& path) const {
    const ordered_json& v = member(obj, key, path);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    return v.get<int>();
  }

  template <typename Parse>
  auto parse_enum(const ordered_json& obj, const std::string& key,
                  const std::string& path, Parse parse) const {
    const std::string s = str(obj, key, path);
    try {
      return parse(s);
    } catch (const PreconditionError& e) {
      fail(join(path, key), e.what());
    }
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ValidationError(id_, field, what);
  }

 private:
  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  std::string id_;
};

}  // namespace

DialogueRecord record_from_json(const ordered_json& j) {
  std::string id;
  if (j.is_object() && j.contains("id") && j["id"].is_string()) {
    id = j["id"].get<std::string>();
  }
  FieldReader rd(id.empty() ? "<unknown>" : id);
  DialogueRecord r;
  r.id = rd.str(j, "id", "");

  const ordered_json& speakers = rd.member(j, "speaker", "");
  if (!speakers.is_object()) rd.fail("speaker", "expected an object");
  for (const auto& [sid, sj] : speakers.items()) {
    SpeakerRef s;
    s.id = sid;
    s.role = rd.parse_enum(sj, "role", "speaker." + sid, parse_role);
    s.gender = rd.parse_enum(sj, "gender", "speaker." + sid, parse_gender);
    r.speakers.push_back(std::move(s));
  }

  const ordered_json& audio = rd.member(j, "audio", "");
  r.audio.channel_count = rd.integer(audio, "channel", "audio");
  r.audio.duration = rd.number(audio, "duration", "audio");
  r.audio.sample_rate = rd.integer(audio, "sample_rate", "audio");

  const ordered_json& channels = rd.member(j, "channel", "");
  if (!channels.is_array()) rd.fail("channel", "expected a list");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string path = "channel[" + std::to_string(i) + "]";
    ChannelInfo c;
    c.channel_index = rd.integer(channels[i], "channel_index", path);
    c.language = rd.parse_enum(channels[i], "language", path, parse_language);
    r.channels.push_back(c);
  }

  const ordered_json& dialog = rd.member(j, "dialog", "");
  if (!dialog.is_array()) rd.fail("dialog", "expected a list");
  for (std::size_t k = 0; k < dialog.size(); ++k) {
    const std::string path = "dialog[" + std::to_string(k) + "]";
    TurnRecord t;
    t.channel = rd.integer(dialog[k], "channel", path);
    t.speaker = rd.str(dialog[k], "speaker", path);
    t.text = rd.str(dialog[k], "text", path);
    t.start = rd.number(dialog[k], "start", path);
    t.end = rd.number(dialog[k], "end", path);
    t.audio_path = rd.str(dialog[k], "audio_path", path);
    r.dialog.push_back(std::move(t));
  }
  return r;
}

namespace {

DialogueRecord decode_element(const std::string& bytes, std::size_t offset) {
  ordered_json oj;
  try {
    oj = ordered_json::parse(bytes);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(e.what(), offset + (e.byte > 0 ? e.byte - 1 : 0));
  }
  DialogueRecord r = record_from_json(oj);
  auto report = validate_record(r);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw ValidationError(r.id, v.field, v.code + ": " + v.message);
  }
  return r;
}

}  // namespace

std::string encode_record(const DialogueRecord& record) {
  return record_to_json(record).dump();
}

std::string encode_metadata(std::span<const DialogueRecord> records) {
  if (records.empty()) return "[]\n";
  std::string out = "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) out += ",\n";
    out += encode_record(records[i]);
  }
  out += "\n]\n";
  return out;
}

void for_each_record(std::istream& in, const RecordSink& sink) {
  JsonArrayReader reader(in);
  std::set<std::string> ids;
  while (auto element = reader.next()) {
    DialogueRecord r = decode_element(element->bytes, element->offset);
    if (!ids.insert(r.id).second) {
      throw ValidationError(r.id, "id", "duplicate dialogue id");
    }
    sink(std::move(r));
  }
}

void for_each_record(const std::filesystem::path& path, const RecordSink& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  for_each_record(in, sink);
}

std::vector<DialogueRecord> decode_metadata(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::vector<DialogueRecord> out;
  for_each_record(in, [&](DialogueRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

std::vector<DialogueRecord> load_metadata(const std::filesystem::path& path) {
  std::vector<DialogueRecord> out;
  for_each_record(path, [&](DialogueRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

MetadataWriter::MetadataWriter(std::filesystem::path path)
    : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  tmp_path_ = path_;
  tmp_path_ += ".tmp";
  out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot write " + tmp_path_.string());
}

MetadataWriter::~MetadataWriter() {
  if (!finished_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_path_, ec);
  }
}

void MetadataWriter::append(const DialogueRecord& record) {
  out_ << (count_ == 0 ? "[\n" : ",\n") << encode_record(record);
  ++count_;
}

void MetadataWriter::finish() {
  out_ << (count_ == 0 ? "[]\n" : "\n]\n");
  out_.close();
  if (!out_) throw IoError("short write to " + tmp_path_.string());
  std::filesystem::rename(tmp_path_, path_);
  finished_ = true;
}

void save_metadata(const std::filesystem::path& path,
                   std::span<const DialogueRecord> records) {
  MetadataWriter writer(path);
  for (const auto& r : records) writer.append(r);
  writer.finish();
}

}  // namespace dialogsynth::corpus
