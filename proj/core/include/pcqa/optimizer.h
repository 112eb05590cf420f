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

#ifndef PCQA_OPTIMIZER_H_
#define PCQA_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "pcqa/ndarray.h"

namespace pcqa {

struct AdamOptions {
  double lr = 3e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with decoupled weight decay. Moments are indexed by position in the
// parameter list handed to Step, which must not change between calls.
class AdamW {
 public:
  explicit AdamW(const AdamOptions& options) : options_(options) {}

  // Updates every trainable param from its grad; frozen params are left
  // untouched. Throws kShapeMismatch if a grad disagrees with its value.
  void Step(std::span<Param* const> params);

  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }
  std::uint64_t steps() const { return steps_; }

  // Moment state for checkpointing.
  std::vector<NdArray>& first_moments() { return m_; }
  std::vector<NdArray>& second_moments() { return v_; }
  const std::vector<NdArray>& first_moments() const { return m_; }
  const std::vector<NdArray>& second_moments() const { return v_; }
  void set_steps(std::uint64_t steps) { steps_ = steps; }

 private:
  AdamOptions options_;
  std::uint64_t steps_ = 0;
  std::vector<NdArray> m_;
  std::vector<NdArray> v_;
};

}  // namespace pcqa

#endif  // PCQA_OPTIMIZER_H_
