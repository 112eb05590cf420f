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

#ifndef PCQA_ALIGNMENT_H_
#define PCQA_ALIGNMENT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcqa/autodiff.h"
#include "pcqa/ndarray.h"
#include "pcqa/osd.h"

namespace pcqa {

// Quality descriptions and their numeric anchors, best quality first.
struct QualityLevels {
  std::vector<std::string> descriptions;
  std::vector<double> q;

  // {excellent, good, fair, poor, bad} -> [5, 4, 3, 2, 1].
  static QualityLevels Default();
  std::size_t size() const { return q.size(); }
  // Throws kLengthMismatch, or kInvalidArgument if q is not strictly monotone.
  void Validate() const;
};

// pi_k = <f_i, f_t[k]> / (|f_i| |f_t[k]|). f_t is K x C.
// Throws kZeroVector, kShapeMismatch.
std::vector<double> Similarities(std::span<const double> image_feature,
                                 const NdArray& text_features);

// p_k = exp(scale * pi_k) / sum_i exp(scale * pi_i), evaluated with the max
// subtracted. scale = 1 is the plain softmax over similarities.
OpinionScoreDistribution OsdFromSimilarities(std::span<const double> similarities,
                                             double scale,
                                             std::span<const double> anchors);

// sum_k p_k * q_k. Throws kLengthMismatch.
double ScoreFromOsd(const OpinionScoreDistribution& osd, const QualityLevels& levels);

// Two-layer MLP C -> C/2 -> 1 with a GELU in between; the score head used
// when the text branch is switched off.
class RegressionHead {
 public:
  RegressionHead(int dim, std::uint64_t seed);

  Var Forward(Graph& g, Var feature);  // 1 x C -> 1 x 1
  double Predict(std::span<const double> feature);

  std::vector<Param*> params();
  Param& fc2_w() { return fc2_w_; }
  Param& fc2_b() { return fc2_b_; }

 private:
  Param fc1_w_, fc1_b_, fc2_w_, fc2_b_;
};

}  // namespace pcqa

#endif  // PCQA_ALIGNMENT_H_
