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

#include "qa/edit_distance.hpp"

namespace dialogsynth::qa {

double ErrorRateReport::rate() const {
  if (ref_len == 0) throw PreconditionError("error rate of an empty reference");
  return static_cast<double>(edits()) / static_cast<double>(ref_len);
}

ErrorRateReport& ErrorRateReport::operator+=(const ErrorRateReport& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_len += o.ref_len;
  return *this;
}

ErrorRateReport edit_distance(std::span<const std::string> ref,
                              std::span<const std::string> hyp) {
  if (ref.empty()) throw PreconditionError("edit distance needs a non-empty reference");
  return align(ref, hyp);
}

}  // namespace dialogsynth::qa
