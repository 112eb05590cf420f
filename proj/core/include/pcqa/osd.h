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

#ifndef PCQA_OSD_H_
#define PCQA_OSD_H_

#include <vector>

namespace pcqa {

// Probability vector over discrete score anchors. `anchors` may be in any
// order (quality levels are conventionally listed best first); consumers
// that need a score axis sort internally.
struct OpinionScoreDistribution {
  std::vector<double> probs;
  std::vector<double> anchors;

  std::size_t size() const { return probs.size(); }

  // Throws kLengthMismatch / kInvalidArgument unless probs >= 0, sums to 1
  // within `tol`, and anchors are distinct and finite.
  void Validate(double tol = 1e-12) const;

  // Expected score sum_k p_k * anchor_k.
  double Mean() const;
};

}  // namespace pcqa

#endif  // PCQA_OSD_H_
