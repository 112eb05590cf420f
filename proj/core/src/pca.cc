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

#include "pcqa/pca.h"

#include <Eigen/Dense>
#include <cmath>

#include "pcqa/error.h"

namespace pcqa {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dominant eigenpair of a symmetric PSD matrix.
double PowerIterate(const Eigen::MatrixXd& cov, Eigen::VectorXd& v) {
  const Eigen::Index c = cov.rows();
  // Deterministic start with no symmetric zero pattern.
  v.resize(c);
  for (Eigen::Index i = 0; i < c; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd w = cov * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double diff = std::min((w - v).norm(), (w + v).norm());
    v = w;
    lambda = v.dot(cov * v);
    if (diff < 1e-10) break;
  }
  return lambda;
}

void FixSign(Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0) v = -v;
}

}  // namespace

Pca2d ComputePca2d(const NdArray& features) {
  const Eigen::Index s = static_cast<Eigen::Index>(features.rows());
  const Eigen::Index c = static_cast<Eigen::Index>(features.cols());
  if (s < 3) Fail(ErrorCode::kLengthMismatch, "PCA needs at least 3 rows");
  RowMat x = Eigen::Map<const RowMat>(features.data(), s, c);
  x.rowwise() -= x.colwise().mean();
  Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(s);

  Pca2d out;
  out.total_variance = cov.trace();
  Eigen::VectorXd v1, v2;
  out.variances[0] = PowerIterate(cov, v1);
  FixSign(v1);
  Eigen::MatrixXd deflated = cov - out.variances[0] * v1 * v1.transpose();
  const double tol = 1e-12 * std::max(out.total_variance, 1e-300);
  if (c < 2) {
    out.rank_deficient = true;
    v2 = Eigen::VectorXd::Zero(c);
  } else {
    out.variances[1] = PowerIterate(deflated, v2);
    if (!(out.variances[1] > tol)) {
      out.rank_deficient = true;
      out.variances[1] = 0.0;
      v2 = Eigen::VectorXd::Zero(c);
    } else {
      FixSign(v2);
    }
  }
  out.coords = NdArray::Zeros(static_cast<std::size_t>(s), 2);
  for (Eigen::Index i = 0; i < s; ++i) {
    out.coords.at(i, 0) = x.row(i).dot(v1);
    out.coords.at(i, 1) = x.row(i).dot(v2);
  }
  out.axes[0].assign(v1.data(), v1.data() + c);
  out.axes[1].assign(v2.data(), v2.data() + c);
  return out;
}

}  // namespace pcqa
