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
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dialogsynth::text {

enum class TemplateName { kRewrite, kSuitability, kClarity, kSafety, kSpokenStyle, kS2tifJudge };

std::string_view to_string(TemplateName name);
TemplateName parse_template_name(std::string_view s);
// Placeholders each template must carry exactly once.
std::vector<std::string> declared_placeholders(TemplateName name);

class PromptTemplate {
 public:
  // Throws PreconditionError unless every declared placeholder appears
  // exactly once and no other `{identifier}` slot appears.
  PromptTemplate(TemplateName name, std::string body);

  TemplateName name() const { return name_; }
  const std::string& body() const { return body_; }
  // Single pass; substituted values are never re-expanded.
  std::string fill(const std::map<std::string, std::string>& values) const;

 private:
  TemplateName name_;
  std::string body_;
};

class PromptSet {
 public:
  // The templates compiled into the library.
  static PromptSet builtin();
  // Reads <dir>/<name>.txt for every template; a missing file raises
  // MissingInputError naming it.
  static PromptSet from_directory(const std::filesystem::path& dir);

  const PromptTemplate& get(TemplateName name) const;
  // Replaces one template, e.g. from a configured path.
  void set(PromptTemplate t);

 private:
  std::map<TemplateName, PromptTemplate> templates_;
};

PromptTemplate load_template(TemplateName name, const std::filesystem::path& path);

}  // namespace dialogsynth::text
