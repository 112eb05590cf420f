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

#include "pcqa/optimizer.h"

#include <cmath>

#include "pcqa/error.h"

namespace pcqa {

void AdamW::Step(std::span<Param* const> params) {
  if (m_.empty()) {
    for (Param* p : params) {
      m_.emplace_back(p->value.shape(), 0.0);
      v_.emplace_back(p->value.shape(), 0.0);
    }
  }
  if (m_.size() != params.size()) {
    Fail(ErrorCode::kShapeMismatch, "optimizer state does not match the parameter list");
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(options_.beta1, t);
  const double c2 = 1.0 - std::pow(options_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    if (!p.trainable) continue;
    if (!p.grad.SameShape(p.value) || !m_[i].SameShape(p.value)) {
      Fail(ErrorCode::kShapeMismatch, p.name + ": grad " + p.grad.ShapeString() +
                                          " vs value " + p.value.ShapeString());
    }
    double* w = p.value.data();
    const double* g = p.grad.data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      m[j] = options_.beta1 * m[j] + (1.0 - options_.beta1) * g[j];
      v[j] = options_.beta2 * v[j] + (1.0 - options_.beta2) * g[j] * g[j];
      const double update = (m[j] / c1) / (std::sqrt(v[j] / c2) + options_.eps);
      w[j] -= options_.lr * (update + options_.weight_decay * w[j]);
    }
  }
}

}  // namespace pcqa
