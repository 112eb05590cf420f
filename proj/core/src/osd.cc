// Copyright 2026 The pcqa Authors.
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

#include "pcqa/osd.h"

#include <cmath>
#include <string>

#include "pcqa/error.h"

namespace pcqa {

void OpinionScoreDistribution::Validate(double tol) const {
  if (probs.size() != anchors.size() || probs.empty()) {
    Fail(ErrorCode::kLengthMismatch,
         "OSD has " + std::to_string(probs.size()) + " probabilities and " +
             std::to_string(anchors.size()) + " anchors");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "OSD probability negative or non-finite");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    Fail(ErrorCode::kInvalidArgument, "OSD sums to " + std::to_string(sum));
  }
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (!std::isfinite(anchors[i])) {
      Fail(ErrorCode::kInvalidArgument, "non-finite OSD anchor");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (anchors[i] == anchors[j]) {
        Fail(ErrorCode::kInvalidArgument, "duplicate OSD anchor");
      }
    }
  }
}

double OpinionScoreDistribution::Mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) s += probs[i] * anchors[i];
  return s;
}

}  // namespace pcqa
