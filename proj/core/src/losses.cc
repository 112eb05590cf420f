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

#include "pcqa/losses.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pcqa/error.h"

namespace pcqa {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace {

constexpr double kTieTol = 1e-9;

Eigen::Map<const RowMat> AsMat(const NdArray& a) {
  return Eigen::Map<const RowMat>(a.data(), static_cast<Eigen::Index>(a.rows()),
                                  static_cast<Eigen::Index>(a.cols()));
}

// Indices that sort `v` ascending.
std::vector<std::size_t> AscendingOrder(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

double MeanStep(std::span<const double> sorted) {
  return (sorted.back() - sorted.front()) / static_cast<double>(sorted.size() - 1);
}

// Gradient of a directional InfoNCE w.r.t. its logits. `z` holds the logits
// of one anchor against all candidates; `pos` is the positive index.
void InfoNceRow(const Eigen::VectorXd& z, Eigen::Index pos, bool exclude_positive,
                double& loss, Eigen::VectorXd& dz) {
  const Eigen::Index n = z.size();
  double mx = -INFINITY;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (exclude_positive && k == pos) continue;
    mx = std::max(mx, z[k]);
  }
  dz.setZero(n);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (exclude_positive && k == pos) continue;
    dz[k] = std::exp(z[k] - mx);
    sum += dz[k];
  }
  dz /= sum;
  loss = -z[pos] + mx + std::log(sum);
  dz[pos] -= 1.0;
}

}  // namespace

void CdfCurve::Validate() const {
  if (scores.size() != cumulative.size() || scores.empty()) {
    Fail(ErrorCode::kLengthMismatch, "CDF curve knots");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i > 0 && !(scores[i] > scores[i - 1])) {
      Fail(ErrorCode::kInvalidArgument, "CDF scores must increase strictly");
    }
    if (i > 0 && cumulative[i] < cumulative[i - 1]) {
      Fail(ErrorCode::kInvalidArgument, "CDF must be nondecreasing");
    }
  }
  if (cumulative.front() < 0.0 || std::abs(cumulative.back() - 1.0) > 1e-12) {
    Fail(ErrorCode::kInvalidArgument, "CDF must start >= 0 and end at 1");
  }
}

ContrastiveResult ContrastiveLoss(const NdArray& color, const NdArray& depth,
                                  double tau1, bool exclude_positive) {
  if (!color.SameShape(depth)) {
    Fail(ErrorCode::kShapeMismatch,
         "contrastive: " + color.ShapeString() + " vs " + depth.ShapeString());
  }
  const Eigen::Index n = static_cast<Eigen::Index>(color.rows());
  if (n < 2) Fail(ErrorCode::kDegenerateBatch, "contrastive loss needs B*M >= 2");
  if (!(tau1 > 0.0)) Fail(ErrorCode::kInvalidArgument, "temperature must be positive");

  auto C = AsMat(color);
  auto D = AsMat(depth);
  const Eigen::VectorXd nc = C.rowwise().norm();
  const Eigen::VectorXd nd = D.rowwise().norm();
  if ((nc.array() == 0.0).any() || (nd.array() == 0.0).any()) {
    Fail(ErrorCode::kZeroVector, "contrastive loss on a zero feature");
  }
  // S(i, k) = cos(color_i, depth_k).
  RowMat s = C * D.transpose();
  s.array().colwise() /= nc.array();
  s.array().rowwise() /= nd.transpose().array();

  RowMat ds = RowMat::Zero(n, n);
  double total = 0.0;
  Eigen::VectorXd dz;
  for (Eigen::Index i = 0; i < n; ++i) {
    double l = 0.0;
    InfoNceRow(s.row(i).transpose() / tau1, i, exclude_positive, l, dz);
    total += l;
    ds.row(i) += dz.transpose();
    InfoNceRow(s.col(i) / tau1, i, exclude_positive, l, dz);
    total += l;
    ds.col(i) += dz;
  }
  const double norm = 1.0 / (2.0 * static_cast<double>(n));
  ds *= norm / tau1;

  // Cosine backward: d s_ik / d c_i = d_k/(|c_i||d_k|) - s_ik c_i/|c_i|^2.
  RowMat w = ds.array().colwise() / nc.array();
  w.array().rowwise() /= nd.transpose().array();
  const Eigen::VectorXd row_dot = ds.cwiseProduct(s).rowwise().sum();
  const Eigen::VectorXd col_dot = ds.cwiseProduct(s).colwise().sum().transpose();

  ContrastiveResult r;
  r.value = total * norm;
  r.grad_color = NdArray(color.shape(), 0.0);
  r.grad_depth = NdArray(depth.shape(), 0.0);
  Eigen::Map<RowMat> GC(r.grad_color.data(), n, C.cols());
  Eigen::Map<RowMat> GD(r.grad_depth.data(), n, D.cols());
  GC.noalias() = w * D;
  GC.array() -= C.array().colwise() * (row_dot.array() / nc.array().square());
  GD.noalias() = w.transpose() * C;
  GD.array() -= D.array().colwise() * (col_dot.array() / nd.array().square());
  return r;
}

CdfCurve CdfFromOsd(const OpinionScoreDistribution& osd) {
  osd.Validate(1e-9);
  const auto order = AscendingOrder(osd.anchors);
  CdfCurve curve;
  double acc = 0.0;
  for (std::size_t i : order) {
    acc += osd.probs[i];
    curve.scores.push_back(osd.anchors[i]);
    curve.cumulative.push_back(acc);
  }
  return curve;
}

std::vector<double> CdfAt(const OpinionScoreDistribution& osd,
                          std::span<const double> scores) {
  std::vector<double> out(scores.size(), 0.0);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    for (std::size_t l = 0; l < osd.size(); ++l) {
      if (osd.anchors[l] <= scores[k] + kTieTol) out[k] += osd.probs[l];
    }
  }
  return out;
}

namespace {

void CheckAxes(const OpinionScoreDistribution& pred,
               const OpinionScoreDistribution& truth) {
  if (pred.size() < 2) Fail(ErrorCode::kLengthMismatch, "prediction needs K >= 2");
  pred.Validate(1e-9);
  truth.Validate(1e-9);
  const auto [plo, phi] = std::minmax_element(pred.anchors.begin(), pred.anchors.end());
  const double step = (*phi - *plo) / static_cast<double>(pred.size() - 1);
  const auto [tlo, thi] = std::minmax_element(truth.anchors.begin(), truth.anchors.end());
  if (*thi > *phi + kTieTol || *tlo < *plo - step - kTieTol) {
    Fail(ErrorCode::kAxisMismatch, "truth options [" + std::to_string(*tlo) + ", " +
                                       std::to_string(*thi) +
                                       "] are not on the anchor axis");
  }
}

}  // namespace

DistributionLoss EmdLoss(const OpinionScoreDistribution& pred,
                         const OpinionScoreDistribution& truth) {
  CheckAxes(pred, truth);
  const std::size_t k = pred.size();
  const std::vector<double> cdf_pred = CdfAt(pred, pred.anchors);
  const std::vector<double> cdf_truth = CdfAt(truth, pred.anchors);
  double sq = 0.0;
  std::vector<double> diff(k);
  for (std::size_t i = 0; i < k; ++i) {
    diff[i] = cdf_pred[i] - cdf_truth[i];
    sq += diff[i] * diff[i];
  }
  DistributionLoss out;
  out.value = std::sqrt(sq / static_cast<double>(k));
  out.grad_pred.assign(k, 0.0);
  if (out.value == 0.0) return out;  // subgradient 0 at the minimum
  // CDF_pred(q_j) = sum_i [q_i <= q_j] p_i.
  for (std::size_t j = 0; j < k; ++j) {
    const double g = diff[j] / (static_cast<double>(k) * out.value);
    for (std::size_t i = 0; i < k; ++i) {
      if (pred.anchors[i] <= pred.anchors[j] + kTieTol) out.grad_pred[i] += g;
    }
  }
  return out;
}

namespace {

struct QuantileEval {
  double score = 0.0;
  // Knot indices into the sorted curve (-1 is the synthetic zero knot) and
  // the partial derivatives of the score w.r.t. their cumulative values.
  int lo = -1, hi = 0;
  double d_lo = 0.0, d_hi = 0.0;
};

QuantileEval EvalQuantile(const CdfCurve& curve, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    Fail(ErrorCode::kThetaOutOfRange, "theta must lie in (0, 1), got " +
                                          std::to_string(theta));
  }
  const std::size_t k = curve.scores.size();
  if (k < 2) Fail(ErrorCode::kLengthMismatch, "quantile needs >= 2 knots");
  const double step = MeanStep(curve.scores);
  std::size_t j = k - 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (curve.cumulative[i] >= theta) {
      j = i;
      break;
    }
  }
  const double s_hi = curve.scores[j];
  const double s_lo = j == 0 ? curve.scores[0] - step : curve.scores[j - 1];
  const double c_hi = curve.cumulative[j];
  const double c_lo = j == 0 ? 0.0 : curve.cumulative[j - 1];
  const double dc = c_hi - c_lo;
  const double ds = s_hi - s_lo;
  QuantileEval e;
  e.lo = static_cast<int>(j) - 1;
  e.hi = static_cast<int>(j);
  if (dc <= 0.0) {  // only reachable through rounding at theta ~ c_hi
    e.score = s_hi;
    return e;
  }
  e.score = s_lo + (theta - c_lo) / dc * ds;
  e.d_lo = ds * (theta - c_hi) / (dc * dc);
  e.d_hi = -ds * (theta - c_lo) / (dc * dc);
  return e;
}

}  // namespace

double Quantile(const CdfCurve& curve, double theta) {
  return EvalQuantile(curve, theta).score;
}

DistributionLoss QuantileLoss(const OpinionScoreDistribution& pred,
                              const OpinionScoreDistribution& truth,
                              std::span<const double> thetas) {
  CheckAxes(pred, truth);
  if (thetas.empty()) Fail(ErrorCode::kInvalidArgument, "no quantile levels");
  const std::size_t k = pred.size();
  const auto order = AscendingOrder(pred.anchors);

  CdfCurve pred_curve, truth_curve;
  for (std::size_t i : order) pred_curve.scores.push_back(pred.anchors[i]);
  truth_curve.scores = pred_curve.scores;
  pred_curve.cumulative = CdfAt(pred, pred_curve.scores);
  truth_curve.cumulative = CdfAt(truth, truth_curve.scores);

  DistributionLoss out;
  out.grad_pred.assign(k, 0.0);
  std::vector<double> d_cum(k, 0.0);  // dL / d pred_curve.cumulative
  const double inv_j = 1.0 / static_cast<double>(thetas.size());
  for (double theta : thetas) {
    const QuantileEval p = EvalQuantile(pred_curve, theta);
    const QuantileEval t = EvalQuantile(truth_curve, theta);
    const double diff = p.score - t.score;
    out.value += std::abs(diff) * inv_j;
    // Subgradient of |x| at 0 taken as 0.
    const double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
    if (p.lo >= 0) d_cum[p.lo] += sign * inv_j * p.d_lo;
    d_cum[p.hi] += sign * inv_j * p.d_hi;
  }
  // cumulative[r] = sum of probabilities whose anchor rank is <= r.
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t rr = r; rr < k; ++rr) out.grad_pred[order[r]] += d_cum[rr];
  }
  return out;
}

double TotalLoss(double emd, double quan, double con, const LossWeights& weights) {
  return emd + weights.alpha * quan + weights.beta * con;
}

}  // namespace pcqa
