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

#include "pcqa/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "pcqa/error.h"

namespace pcqa {

GradCheckResult GradCheck(const ScalarLossFn& loss, std::span<Param* const> params,
                          const GradCheckOptions& options) {
  for (Param* p : params) p->ZeroGrad();
  const double base = loss(true);
  if (!std::isfinite(base)) Fail(ErrorCode::kNonFinite, "loss is not finite");

  std::mt19937_64 rng(options.seed);
  GradCheckResult result;
  for (Param* p : params) {
    if (!p->trainable) continue;
    const NdArray analytic = p->grad;
    const std::size_t n = p->value.size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (n > options.coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.coords_per_param);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t i : coords) {
      double& x = p->value[i];
      const double saved = x;
      x = saved + options.step;
      const double hi_x = x;
      const double f_hi = loss(false);
      x = saved - options.step;
      const double lo_x = x;
      const double f_lo = loss(false);
      x = saved;
      if (!std::isfinite(f_hi) || !std::isfinite(f_lo)) {
        Fail(ErrorCode::kNonFinite, "loss not finite while probing " + p->name);
      }
      const double numeric = (f_hi - f_lo) / (hi_x - lo_x);
      const double a = analytic[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++result.coords_checked;
      if (rel > result.max_relative_error || result.worst_param.empty()) {
        result.max_relative_error = rel;
        result.worst_param = p->name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace pcqa
