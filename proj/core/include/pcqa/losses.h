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

#ifndef PCQA_LOSSES_H_
#define PCQA_LOSSES_H_

#include <span>
#include <vector>

#include "pcqa/ndarray.h"
#include "pcqa/osd.h"

namespace pcqa {

// Piecewise-linear CDF knots: strictly increasing scores, nondecreasing
// cumulative probabilities ending at 1.
struct CdfCurve {
  std::vector<double> scores;
  std::vector<double> cumulative;

  void Validate() const;
};

struct LossWeights {
  double alpha = 0.2;   // quantile term; 1/K for K = 5
  double beta = 0.08;   // contrastive term
  double tau1 = 0.07;   // contrastive temperature
};

// Value plus gradient with respect to the prediction's probabilities (in
// the prediction's own anchor order).
struct DistributionLoss {
  double value = 0.0;
  std::vector<double> grad_pred;
};

struct ContrastiveResult {
  double value = 0.0;
  NdArray grad_color;
  NdArray grad_depth;
};

// Symmetric InfoNCE between modality rows. Row i of `color` and row i of
// `depth` are the positive pair (same sample, same view); every row of the
// opposite modality forms the denominator. With exclude_positive the
// positive is left out of the denominator. Loss is averaged over the 2*B*M
// anchors. Throws kDegenerateBatch (fewer than 2 rows), kZeroVector.
ContrastiveResult ContrastiveLoss(const NdArray& color, const NdArray& depth,
                                  double tau1, bool exclude_positive = false);

// Cumulative sums over the anchors sorted ascending.
CdfCurve CdfFromOsd(const OpinionScoreDistribution& osd);

// CDF of `osd` evaluated at arbitrary scores: total mass at anchors <= s
// (with a 1e-9 tolerance on ties).
std::vector<double> CdfAt(const OpinionScoreDistribution& osd,
                          std::span<const double> scores);

// sqrt(mean_k (CDF_pred(q_k) - CDF_truth(q_k))^2) over the prediction's
// anchors q_k. Truth may live on a different set of raw options of the same
// score axis. Throws kAxisMismatch when the truth options leave the range
// [min q - step, max q], step being the mean anchor spacing.
DistributionLoss EmdLoss(const OpinionScoreDistribution& pred,
                         const OpinionScoreDistribution& truth);

// Leftmost score at which the linearly interpolated CDF reaches theta. The
// curve is extended with a synthetic knot (s_1 - step, 0).
// Throws kThetaOutOfRange unless 0 < theta < 1.
double Quantile(const CdfCurve& curve, double theta);

// (1/J) sum_j |s_pred(theta_j) - s_truth(theta_j)|, both CDFs taken at the
// prediction's anchors.
DistributionLoss QuantileLoss(const OpinionScoreDistribution& pred,
                              const OpinionScoreDistribution& truth,
                              std::span<const double> thetas);

inline constexpr double kDefaultThetas[] = {0.25, 0.50, 0.75};

double TotalLoss(double emd, double quan, double con, const LossWeights& weights);

}  // namespace pcqa

#endif  // PCQA_LOSSES_H_
