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

#ifndef PCQA_GRAD_CHECK_H_
#define PCQA_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "pcqa/ndarray.h"

namespace pcqa {

// Evaluates a scalar loss at the current parameter values. When
// `with_grad` is true it must also add the analytic gradient into
// Param::grad of every trainable parameter.
using ScalarLossFn = std::function<double(bool with_grad)>;

struct GradCheckOptions {
  double step = 1e-5;
  // Coordinates probed per parameter; parameters with fewer entries are
  // probed exhaustively.
  std::size_t coords_per_param = 64;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
};

// Compares analytic gradients with central differences
// (f(x+h) - f(x-h)) / 2h. Relative error uses the denominator
// max(|analytic|, |numeric|, 1e-8). Frozen parameters are skipped.
// Parameter values are restored exactly afterwards.
GradCheckResult GradCheck(const ScalarLossFn& loss, std::span<Param* const> params,
                          const GradCheckOptions& options = {});

}  // namespace pcqa

#endif  // PCQA_GRAD_CHECK_H_
