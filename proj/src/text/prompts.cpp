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

#include "text/prompts.hpp"

#include <algorithm>
#include <regex>

#include "util/error.hpp"
#include "util/io.hpp"

namespace dialogsynth::text {

namespace detail {
const std::map<std::string, std::string, std::less<>>& builtin_templates();
}

namespace {

constexpr TemplateName kAll[] = {TemplateName::kRewrite,     TemplateName::kSuitability,
                                 TemplateName::kClarity,     TemplateName::kSafety,
                                 TemplateName::kSpokenStyle, TemplateName::kS2tifJudge};

const std::regex& placeholder_re() {
  static const std::regex re(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
  return re;
}

}  // namespace

std::string_view to_string(TemplateName name) {
  switch (name) {
    case TemplateName::kRewrite: return "rewrite";
    case TemplateName::kSuitability: return "suitability";
    case TemplateName::kClarity: return "clarity";
    case TemplateName::kSafety: return "safety";
    case TemplateName::kSpokenStyle: return "spoken_style";
    case TemplateName::kS2tifJudge: return "s2tif_judge";
  }
  return "?";
}

TemplateName parse_template_name(std::string_view s) {
  for (TemplateName n : kAll) {
    if (to_string(n) == s) return n;
  }
  throw PreconditionError("unknown prompt template '" + std::string(s) + "'");
}

std::vector<std::string> declared_placeholders(TemplateName name) {
  switch (name) {
    case TemplateName::kSpokenStyle: return {"Command"};
    case TemplateName::kS2tifJudge: return {"instruction", "response"};
    default: return {"instruction"};
  }
}

PromptTemplate::PromptTemplate(TemplateName name, std::string body)
    : name_(name), body_(std::move(body)) {
  std::map<std::string, int> seen;
  for (std::sregex_iterator it(body_.begin(), body_.end(), placeholder_re()), end; it != end;
       ++it) {
    ++seen[(*it)[1].str()];
  }
  const auto declared = declared_placeholders(name_);
  for (const auto& p : declared) {
    if (seen[p] != 1) {
      throw PreconditionError("template '" + std::string(to_string(name_)) +
                              "' must contain {" + p + "} exactly once, found " +
                              std::to_string(seen[p]));
    }
  }
  for (const auto& [p, count] : seen) {
    if (count > 0 && std::find(declared.begin(), declared.end(), p) == declared.end()) {
      throw PreconditionError("template '" + std::string(to_string(name_)) +
                              "' has undeclared placeholder {" + p + "}");
    }
  }
}

std::string PromptTemplate::fill(const std::map<std::string, std::string>& values) const {
  std::string out;
  auto last = body_.cbegin();
  for (std::sregex_iterator it(body_.begin(), body_.end(), placeholder_re()), end; it != end;
       ++it) {
    const auto& m = *it;
    out.append(last, m[0].first);
    auto v = values.find(m[1].str());
    if (v == values.end()) {
      throw PreconditionError("no value for {" + m[1].str() + "} in template '" +
                              std::string(to_string(name_)) + "'");
    }
    out += v->second;
    last = m[0].second;
  }
  out.append(last, body_.cend());
  return out;
}

PromptSet PromptSet::builtin() {
  PromptSet set;
  const auto& raw = detail::builtin_templates();
  for (TemplateName n : kAll) {
    set.set(PromptTemplate(n, raw.at(std::string(to_string(n)))));
  }
  return set;
}

PromptTemplate load_template(TemplateName name, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingInputError(path.string());
  std::string body = read_file(path);
  if (!body.empty() && body.back() == '\n') body.pop_back();
  return PromptTemplate(name, std::move(body));
}

PromptSet PromptSet::from_directory(const std::filesystem::path& dir) {
  PromptSet set;
  for (TemplateName n : kAll) {
    set.set(load_template(n, dir / (std::string(to_string(n)) + ".txt")));
  }
  return set;
}

const PromptTemplate& PromptSet::get(TemplateName name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw PreconditionError("template '" + std::string(to_string(name)) + "' not loaded");
  }
  return it->second;
}

void PromptSet::set(PromptTemplate t) { templates_.insert_or_assign(t.name(), std::move(t)); }

}  // namespace dialogsynth::text
