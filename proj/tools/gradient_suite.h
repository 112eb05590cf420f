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

#ifndef PCQA_TOOLS_GRADIENT_SUITE_H_
#define PCQA_TOOLS_GRADIENT_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pcqa/grad_check.h"

namespace pcqa {

struct SuiteEntry {
  std::string operation;
  GradCheckResult result;
};

// Finite-difference checks over every differentiable operation of the
// pipeline, from single ops up to the full training loss on a two-sample
// batch of a reduced-size model.
std::vector<SuiteEntry> RunGradientSuite(std::uint64_t seed, const GradCheckOptions& options);

}  // namespace pcqa

#endif  // PCQA_TOOLS_GRADIENT_SUITE_H_
