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

#include "pcqa/alignment.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "pcqa/error.h"
#include "pcqa/text_encoder.h"
#include "pcqa/vit.h"

namespace pcqa {

QualityLevels QualityLevels::Default() {
  return {kDefaultQualityAdjectives, {5.0, 4.0, 3.0, 2.0, 1.0}};
}

void QualityLevels::Validate() const {
  if (descriptions.size() != q.size() || q.size() < 2) {
    Fail(ErrorCode::kLengthMismatch, "quality levels need K >= 2 names and anchors");
  }
  const bool descending = q[0] > q[1];
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (descending ? !(q[i - 1] > q[i]) : !(q[i - 1] < q[i])) {
      Fail(ErrorCode::kInvalidArgument, "quality anchors must be strictly monotone");
    }
  }
}

std::vector<double> Similarities(std::span<const double> image_feature,
                                 const NdArray& text_features) {
  const std::size_t c = image_feature.size();
  if (text_features.cols() != c) {
    Fail(ErrorCode::kShapeMismatch, "image feature width " + std::to_string(c) +
                                        " vs text " + text_features.ShapeString());
  }
  double ni = 0.0;
  for (double v : image_feature) ni += v * v;
  ni = std::sqrt(ni);
  if (ni == 0.0) Fail(ErrorCode::kZeroVector, "zero image feature");
  std::vector<double> out(text_features.rows());
  for (std::size_t k = 0; k < out.size(); ++k) {
    double dot = 0.0, nt = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double t = text_features.at(k, j);
      dot += image_feature[j] * t;
      nt += t * t;
    }
    if (nt == 0.0) Fail(ErrorCode::kZeroVector, "zero text feature");
    out[k] = dot / (ni * std::sqrt(nt));
  }
  return out;
}

OpinionScoreDistribution OsdFromSimilarities(std::span<const double> similarities,
                                             double scale,
                                             std::span<const double> anchors) {
  if (similarities.size() != anchors.size() || similarities.empty()) {
    Fail(ErrorCode::kLengthMismatch, "similarities vs anchors");
  }
  OpinionScoreDistribution osd;
  osd.anchors.assign(anchors.begin(), anchors.end());
  osd.probs.resize(similarities.size());
  double mx = -INFINITY;
  for (double s : similarities) {
    if (!std::isfinite(s)) Fail(ErrorCode::kNonFinite, "non-finite similarity");
    mx = std::max(mx, scale * s);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < similarities.size(); ++k) {
    osd.probs[k] = std::exp(scale * similarities[k] - mx);
    sum += osd.probs[k];
  }
  for (double& p : osd.probs) p /= sum;
  return osd;
}

double ScoreFromOsd(const OpinionScoreDistribution& osd, const QualityLevels& levels) {
  if (osd.size() != levels.size()) {
    Fail(ErrorCode::kLengthMismatch, "OSD has " + std::to_string(osd.size()) +
                                         " levels, expected " +
                                         std::to_string(levels.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < osd.size(); ++k) s += osd.probs[k] * levels.q[k];
  // Rounding can push a convex combination a hair outside the anchor range.
  const auto [lo, hi] = std::minmax_element(levels.q.begin(), levels.q.end());
  return std::clamp(s, *lo, *hi);
}

RegressionHead::RegressionHead(int dim, std::uint64_t seed) {
  if (dim < 2) Fail(ErrorCode::kInvalidArgument, "regression head needs C >= 2");
  std::mt19937_64 rng(seed);
  const int hidden = dim / 2;
  fc1_w_ = Param("head.fc1.w", RandomNormal(dim, hidden, 1.0 / std::sqrt(dim), rng));
  fc1_b_ = Param("head.fc1.b", NdArray::Zeros(1, hidden));
  fc2_w_ = Param("head.fc2.w", RandomNormal(hidden, 1, 1.0 / std::sqrt(hidden), rng));
  fc2_b_ = Param("head.fc2.b", NdArray::Zeros(1, 1));
}

Var RegressionHead::Forward(Graph& g, Var feature) {
  using namespace ad;
  Var h = Gelu(AddRow(MatMul(feature, g.Parameter(fc1_w_)), g.Parameter(fc1_b_)));
  return AddRow(MatMul(h, g.Parameter(fc2_w_)), g.Parameter(fc2_b_));
}

double RegressionHead::Predict(std::span<const double> feature) {
  Graph g;
  return Forward(g, g.Constant(NdArray::Row(feature))).scalar();
}

std::vector<Param*> RegressionHead::params() {
  return {&fc1_w_, &fc1_b_, &fc2_w_, &fc2_b_};
}

}  // namespace pcqa
