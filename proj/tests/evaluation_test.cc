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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pcqa/metrics.h"
#include "pcqa/pca.h"
#include "test_support.h"

namespace pcqa {
namespace {

using testing::ExpectErrorCode;

TEST(MetricsTest, AffineAndReversed) {
  const std::vector<double> x = {0.3, -1.2, 4.0, 2.2, 0.9, 7.5};
  std::vector<double> y, rev;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  for (double v : x) rev.push_back(-v);
  EXPECT_NEAR(Plcc(x, y), 1.0, 1e-15);
  EXPECT_NEAR(Srcc(x, y), 1.0, 1e-15);
  EXPECT_NEAR(Srcc(x, rev), -1.0, 1e-15);
  EXPECT_NEAR(Rmse(x, x), 0.0, 0.0);
  EXPECT_NEAR(Rmse(std::vector<double>{0, 0, 0}, std::vector<double>{3, 3, 3}), 3.0, 1e-15);
}

TEST(MetricsTest, SpearmanOracle) {
  const std::vector<double> x = {1, 2, 3, 4}, y = {1, 3, 2, 4};
  EXPECT_NEAR(Srcc(x, y), 0.8, 1e-15);
}

TEST(MetricsTest, TiesShareMeanRank) {
  EXPECT_EQ(AverageRanks(std::vector<double>{3, 1, 3, 2}), (std::vector<double>{3.5, 1, 3.5, 2}));
  const std::vector<double> t = {1, 1, 2};
  EXPECT_NEAR(Srcc(t, t), 1.0, 1e-15);
}

TEST(MetricsTest, InvariantUnderIncreasingAffineMaps) {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(20), y(20), xs(20), ys(20);
    for (int i = 0; i < 20; ++i) {
      x[i] = n(rng);
      y[i] = x[i] + n(rng);
      xs[i] = 3.7 * x[i] - 11.0;
      ys[i] = 0.05 * y[i] + 2.0;
    }
    EXPECT_NEAR(Plcc(x, y), Plcc(xs, ys), 1e-12);
    EXPECT_NEAR(Srcc(x, y), Srcc(xs, ys), 1e-12);
    EXPECT_LE(std::abs(Plcc(x, y)), 1.0);
  }
}

TEST(MetricsTest, Errors) {
  const std::vector<double> a = {1, 2, 3}, c = {2, 2, 2}, shorter = {1, 2};
  ExpectErrorCode(ErrorCode::kConstantInput, [&] { Plcc(a, c); });
  ExpectErrorCode(ErrorCode::kConstantInput, [&] { Srcc(c, a); });
  ExpectErrorCode(ErrorCode::kLengthMismatch, [&] { Plcc(a, shorter); });
  ExpectErrorCode(ErrorCode::kLengthMismatch, [&] { Srcc(shorter, shorter); });
  ExpectErrorCode(ErrorCode::kLengthMismatch, [&] { Rmse(a, shorter); });
}

TEST(LogisticTest, RecoversNoiselessCurve) {
  Logistic4 truth;
  truth.beta = {5.0, 1.0, 0.5, 0.2};
  std::vector<double> pred, mos;
  for (int i = 0; i < 41; ++i) {
    pred.push_back(-0.5 + 0.05 * i);
    mos.push_back(truth(pred.back()));
  }
  const LogisticFit fit = FitLogistic4(pred, mos);
  double se = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) se += std::pow(fit.map(pred[i]) - mos[i], 2);
  EXPECT_LT(std::sqrt(se / pred.size()), 1e-6);
  EXPECT_NEAR(fit.map.beta[0], 5.0, 1e-4);
  EXPECT_NEAR(fit.map.beta[1], 1.0, 1e-4);
  EXPECT_NEAR(fit.map.beta[2], 0.5, 1e-4);
  EXPECT_NEAR(std::abs(fit.map.beta[3]), 0.2, 1e-4);
}

TEST(LogisticTest, MappedNeverWorseThanIdentityAndMonotone) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<double> pred, mos;
  for (int i = 0; i < 60; ++i) {
    mos.push_back(u(rng));
    pred.push_back(mos.back());
  }
  const LogisticFit exact = FitLogistic4(pred, mos);
  double mapped = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) mapped += std::pow(exact.map(pred[i]) - mos[i], 2);
  EXPECT_LE(std::sqrt(mapped / pred.size()), 1e-2);

  for (double& p : pred) p += noise(rng);
  const LogisticFit fit = FitLogistic4(pred, mos);
  EXPECT_LE(std::sqrt(fit.sse / pred.size()), Rmse(pred, mos) + 1e-12);
  std::vector<double> sorted = pred;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    EXPECT_LE(fit.map(sorted[i - 1]), fit.map(sorted[i]));
  }
  ExpectErrorCode(ErrorCode::kLengthMismatch,
                  [] { FitLogistic4(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3, 4}); });
  ExpectErrorCode(ErrorCode::kConstantInput, [] {
    FitLogistic4(std::vector<double>(6, 1.0), std::vector<double>{1, 2, 3, 4, 5, 6});
  });
}

TEST(EvaluateTest, ReportLineAndRows) {
  const std::vector<double> pred = {1.1, 2.3, 2.9, 4.2, 4.8, 3.3};
  const std::vector<double> mos = {1.0, 2.0, 3.0, 4.0, 5.0, 3.5};
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e", "f"};
  const EvalReport r = Evaluate(pred, mos, ids);
  EXPECT_NEAR(r.srcc, 1.0, 1e-15);
  EXPECT_GT(r.plcc, 0.98);
  EXPECT_GE(r.rmse, 0.0);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.rows[3].sample_id, "d");
  EXPECT_EQ(r.SummaryLine().rfind("plcc=", 0), 0u);
  EXPECT_NE(r.SummaryLine().find(",srcc="), std::string::npos);
  EXPECT_NE(r.SummaryLine().find(",rmse="), std::string::npos);
  const std::string csv = r.Csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

// Eigenvalues of a symmetric 3x3 matrix from its characteristic cubic,
// descending.
std::array<double, 3> CubicEigenvalues(const Eigen::Matrix3d& a) {
  const double tr = a.trace();
  const double c1 = a(0, 0) * a(1, 1) + a(0, 0) * a(2, 2) + a(1, 1) * a(2, 2) -
                    a(0, 1) * a(1, 0) - a(0, 2) * a(2, 0) - a(1, 2) * a(2, 1);
  const double det = a.determinant();
  // lambda^3 - tr lambda^2 + c1 lambda - det = 0, depressed via lambda = t + tr/3.
  const double p = c1 - tr * tr / 3.0;
  const double q = -2.0 * tr * tr * tr / 27.0 + tr * c1 / 3.0 - det;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double phi = std::acos(3.0 * q / (p * m)) / 3.0;
  std::array<double, 3> out;
  for (int k = 0; k < 3; ++k) out[k] = tr / 3.0 + m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

TEST(PcaTest, FixedMatrixMatchesCharacteristicPolynomial) {
  const NdArray x = NdArray::FromRows({{2, 0, 1}, {0, 1, 3}, {4, 2, 0}, {1, 5, 2}, {3, 3, 3}});
  Eigen::MatrixXd m(5, 3);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = x.at(r, c);
  }
  const Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
  const Eigen::Matrix3d cov = centered.transpose() * centered / 5.0;
  const auto eig = CubicEigenvalues(cov);
  EXPECT_NEAR(eig[0], 3.16464724, 1e-8);
  EXPECT_NEAR(eig[1], 2.57899609, 1e-8);
  EXPECT_NEAR(eig[2], 0.57635667, 1e-8);

  const Pca2d pca = ComputePca2d(x);
  EXPECT_NEAR(pca.variances[0], eig[0], 1e-8);
  EXPECT_NEAR(pca.variances[1], eig[1], 1e-8);
  EXPECT_NEAR(pca.total_variance, cov.trace(), 1e-12);
  EXPECT_FALSE(pca.rank_deficient);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector3d v = solver.eigenvectors().col(2 - k);
    double dot = 0.0;
    for (int c = 0; c < 3; ++c) dot += v(c) * pca.axes[k][c];
    EXPECT_NEAR(std::abs(dot), 1.0, 1e-8);
    for (int r = 0; r < 5; ++r) {
      EXPECT_NEAR(std::abs(pca.coords.at(r, k)), std::abs(centered.row(r).dot(v)), 1e-8);
    }
  }
}

TEST(PcaTest, PlanarDataIsFullyExplained) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> n(0.0, 1.0);
  const int c = 12;
  std::vector<double> u(c), v(c), origin(c);
  for (int k = 0; k < c; ++k) {
    u[k] = n(rng);
    v[k] = n(rng);
    origin[k] = n(rng);
  }
  NdArray x({40, static_cast<std::size_t>(c)});
  for (std::size_t r = 0; r < 40; ++r) {
    const double a = 3.0 * n(rng), b = n(rng);
    for (int k = 0; k < c; ++k) x.at(r, k) = origin[k] + a * u[k] + b * v[k];
  }
  const Pca2d pca = ComputePca2d(x);
  EXPECT_GT((pca.variances[0] + pca.variances[1]) / pca.total_variance, 0.9999);
  for (int k = 0; k < 2; ++k) {
    const auto& axis = pca.axes[k];
    const auto big = std::max_element(axis.begin(), axis.end(),
                                      [](double a, double b) { return std::abs(a) < std::abs(b); });
    EXPECT_GT(*big, 0.0);
  }
}

TEST(PcaTest, RowPermutationPermutesCoordinates) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n(0.0, 1.0);
  NdArray x({10, 5});
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t k = 0; k < 5; ++k) x.at(r, k) = n(rng) * (k + 1);
  }
  std::vector<std::size_t> perm = {3, 7, 0, 9, 1, 4, 2, 8, 6, 5};
  NdArray permuted({10, 5});
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t k = 0; k < 5; ++k) permuted.at(r, k) = x.at(perm[r], k);
  }
  const Pca2d a = ComputePca2d(x), b = ComputePca2d(permuted);
  for (int k = 0; k < 2; ++k) {
    const double sign = a.coords.at(perm[0], k) * b.coords.at(0, k) >= 0 ? 1.0 : -1.0;
    for (std::size_t r = 0; r < 10; ++r) {
      EXPECT_NEAR(b.coords.at(r, k), sign * a.coords.at(perm[r], k), 1e-8);
    }
  }
}

TEST(PcaTest, CollinearDataIsRankDeficient) {
  NdArray x({6, 3});
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t k = 0; k < 3; ++k) x.at(r, k) = static_cast<double>(r) * (k + 1.0);
  }
  const Pca2d pca = ComputePca2d(x);
  EXPECT_TRUE(pca.rank_deficient);
  for (std::size_t r = 0; r < 6; ++r) EXPECT_EQ(pca.coords.at(r, 1), 0.0);
  ExpectErrorCode(ErrorCode::kLengthMismatch, [] { ComputePca2d(NdArray::Zeros(2, 3)); });
}

}  // namespace
}  // namespace pcqa
