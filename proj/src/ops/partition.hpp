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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus/types.hpp"

namespace dialogsynth::ops {

struct SubsetTarget {
  std::string name;
  std::map<Language, double> hours;  // ignored when `all` is set
  bool all = false;
};

struct PartitionSpec {
  std::vector<SubsetTarget> subsets;
  std::uint64_t seed = 0;
  double scale = 1.0;  // multiplies every target

  // XS 1000/500, S 4000/2000, M 10000/5000, L 20000/10000 hours (zh/en)
  // and XL = everything.
  static PartitionSpec defaults(std::uint64_t seed);
  // Keeps only the named subsets, in default order.
  PartitionSpec only(std::span<const std::string> names) const;
};

struct Subset {
  std::string name;
  std::vector<std::string> ids;  // in selection order
  std::map<Language, double> target_seconds;
  std::map<Language, double> seconds;
};

struct PartitionResult {
  std::vector<Subset> subsets;
};

// Nested subsets by greedy accumulation over a seeded shuffle. The first
// subset is repaired so that every speaker of the corpus appears in it;
// later subsets extend the previous one and inherit coverage. If `roster`
// is given, a roster speaker without any dialogue is an error.
PartitionResult partition(std::span<const corpus::DialogueRecord> corpus,
                          const PartitionSpec& spec,
                          const std::vector<std::string>* roster = nullptr);

}  // namespace dialogsynth::ops
