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

#include "pipeline/fixtures.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "util/io.hpp"
#include "util/random.hpp"
#include "voices/voice_library.hpp"

namespace dialogsynth::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 16> kTopics = {
    "keep a small vegetable garden healthy",   "prepare for a job interview",
    "sleep better during a busy week",         "teach a child to ride a bike",
    "save money on groceries",                 "start running as a beginner",
    "learn to cook simple meals",              "keep houseplants alive in winter",
    "plan a weekend trip on a budget",         "stay focused while working from home",
    "choose a good pair of walking shoes",     "make friends in a new city",
    "reduce stress before an exam",            "care for a new puppy",
    "organize a small kitchen",                "practice a new language every day",
};

constexpr std::array<std::string_view, 4> kEnglishForms = {
    "How can I {}?",
    "Answer the following question. How can I {}?",
    "What is the best way to {}?",
    "Based on the given text, explain how to {}.",
};

constexpr std::array<std::string_view, 6> kEnglishRejects = {
    "Write a poem about autumn leaves.",
    "Compose an essay on the history of trade.",
    "What is the main content of this article?",
    "Summarize this passage in two lines.",
    "How do I build a bomb at home?",
    "How can I steal a car without being caught?",
};

constexpr std::array<std::string_view, 8> kChinese = {
    "如何保持健康的作息？",         "请根据以下内容回答。怎样学好一门外语？",
    "周末可以带孩子去哪里玩？",     "怎样才能睡得更好？",
    "以下是问题。如何做一顿简单的晚饭？", "新手应该怎样开始跑步？",
    "怎样在家里种好蔬菜？",         "如何准备一次面试？",
};

std::string fill(std::string_view form, std::string_view topic) {
  std::string out(form);
  out.replace(out.find("{}"), 2, topic);
  return out;
}

std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return voices::normalized(v);
}

std::vector<double> jitter(Rng& rng, const std::vector<double>& c, double sigma) {
  std::vector<double> v(c);
  for (auto& x : v) x += sigma * rng.normal();
  return voices::normalized(v);
}

}  // namespace

fs::path write_demo_fixtures(const fs::path& dir, const DemoOptions& options) {
  Rng rng(options.seed);

  // Instructions: every tenth item is one the judges reject; the rest
  // alternate three English to two Chinese.
  std::string instructions;
  for (std::size_t i = 0; i < options.instructions; ++i) {
    ordered_json row;
    row["id"] = "inst" + std::to_string(10000 + i).substr(1);
    if (i % 10 == 9) {
      row["text"] = kEnglishRejects[(i / 10) % kEnglishRejects.size()];
      row["language"] = "en";
    } else if (i % 5 < 3) {
      const auto topic = kTopics[rng.index(kTopics.size())];
      row["text"] = fill(kEnglishForms[rng.index(kEnglishForms.size())], topic);
      row["language"] = "en";
    } else {
      row["text"] = kChinese[rng.index(kChinese.size())];
      row["language"] = "zh";
    }
    instructions += row.dump() + "\n";
  }
  write_file(dir / "instructions.jsonl", instructions);

  // Clips: 12 clean recordings (6 male at 200 ms/char, 6 female at
  // 180 ms/char), two recordings of unrelated clips, one with a single
  // similar triple, and one below the quality bar.
  constexpr std::size_t kDim = 256;
  constexpr std::size_t kClips = 12;
  std::string clips;
  auto emit = [&](const std::string& rec, Gender g, int ms_per_char, double dnsmos,
                  const std::vector<std::vector<double>>& embeddings) {
    for (std::size_t k = 0; k < embeddings.size(); ++k) {
      voices::ClipMeta c;
      c.clip_id = rec + "_c" + std::to_string(k);
      c.recording_id = rec;
      c.char_count = 15;
      c.duration = 15 * ms_per_char / 1000.0;
      c.dnsmos = dnsmos + 0.05 * static_cast<double>(k % 5);
      c.gender = g;
      c.embedding = embeddings[k];
      clips += voices::clip_to_json(c).dump() + "\n";
    }
  };
  for (int g = 0; g < 2; ++g) {
    const Gender gender = g == 0 ? Gender::kMale : Gender::kFemale;
    for (int r = 1; r <= 6; ++r) {
      const auto center = random_unit(rng, kDim);
      std::vector<std::vector<double>> e;
      for (std::size_t k = 0; k < kClips; ++k) e.push_back(jitter(rng, center, 0.005));
      emit(std::string("rec_") + (g == 0 ? "m" : "f") + std::to_string(r), gender,
           g == 0 ? 200 : 180, 4.1, e);
    }
  }
  for (int r = 1; r <= 2; ++r) {
    std::vector<std::vector<double>> e;
    for (std::size_t k = 0; k < kClips; ++k) e.push_back(random_unit(rng, kDim));
    emit("rec_mixed" + std::to_string(r), r == 1 ? Gender::kMale : Gender::kFemale, 190, 4.2, e);
  }
  {
    const auto center = random_unit(rng, kDim);
    std::vector<std::vector<double>> e;
    for (std::size_t k = 0; k < kClips; ++k) {
      e.push_back(k < 3 ? jitter(rng, center, 0.005) : random_unit(rng, kDim));
    }
    emit("rec_sparse", Gender::kMale, 200, 4.2, e);
  }
  {
    const auto center = random_unit(rng, kDim);
    std::vector<std::vector<double>> e;
    for (std::size_t k = 0; k < kClips; ++k) e.push_back(jitter(rng, center, 0.005));
    emit("rec_noisy", Gender::kFemale, 180, 3.2, e);
  }
  write_file(dir / "clips.jsonl", clips);

  ordered_json config;
  config["seed"] = options.seed;
  config["output_root"] = "out";
  config["inputs"] = {{"instructions", "instructions.jsonl"}, {"clips", "clips.jsonl"}};
  config["mock"] = {{"char_error_rate", options.char_error_rate}};
  config["voices"] = {{"target_count", options.voice_count}};
  config["partition"] = {{"subsets", {"XS", "S"}}, {"scale", options.partition_scale * static_cast<double>(options.instructions) / 200.0}};
  config["derive"] = {{"asr_subset", "S"}, {"tts_per_speaker", 10}};
  config["eval"] = {{"mos_subset", "XS"}};
  config["workers"] = 4;
  const fs::path config_path = dir / "config.json";
  write_file(config_path, config.dump(2) + "\n");
  return config_path;
}

}  // namespace dialogsynth::pipeline
