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

#include "pcqa/metrics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcqa/error.h"
#include "pcqa/file_util.h"

namespace pcqa {

namespace {

void CheckPair(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) {
    Fail(ErrorCode::kLengthMismatch, "metric inputs differ in length (" +
                                         std::to_string(x.size()) + " vs " +
                                         std::to_string(y.size()) + ")");
  }
  if (x.size() < min_n) {
    Fail(ErrorCode::kLengthMismatch, "need at least " + std::to_string(min_n) + " points");
  }
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double StdDev(std::span<const double> v) {
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double Median(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

bool IsConstant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

double Sse(const Logistic4& f, std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = f(x[i]) - y[i];
    s += r * r;
  }
  return s;
}

}  // namespace

double Plcc(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, 3);
  if (IsConstant(x) || IsConstant(y)) Fail(ErrorCode::kConstantInput, "PLCC of a constant");
  const double mx = Mean(x), my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double Srcc(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, 3);
  if (IsConstant(x) || IsConstant(y)) Fail(ErrorCode::kConstantInput, "SRCC of a constant");
  const std::vector<double> rx = AverageRanks(x), ry = AverageRanks(y);
  return Plcc(rx, ry);
}

double Rmse(std::span<const double> x, std::span<const double> y) {
  CheckPair(x, y, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s / static_cast<double>(x.size()));
}

double Logistic4::operator()(double x) const {
  const auto& [b1, b2, b3, b4] = beta;
  return b2 + (b1 - b2) / (1.0 + std::exp(-(x - b3) / std::abs(b4)));
}

LogisticFit FitLogistic4(std::span<const double> pred, std::span<const double> mos) {
  CheckPair(pred, mos, 5);
  if (IsConstant(pred) || IsConstant(mos)) {
    Fail(ErrorCode::kConstantInput, "logistic fit on constant data");
  }
  const std::size_t n = pred.size();
  LogisticFit fit;
  fit.map.beta = {*std::max_element(mos.begin(), mos.end()),
                  *std::min_element(mos.begin(), mos.end()), Median(pred), StdDev(pred)};
  fit.sse = Sse(fit.map, pred, mos);
  double lambda = 1e-3;
  Eigen::MatrixXd jac(n, 4);
  Eigen::VectorXd res(n);
  for (fit.iterations = 0; fit.iterations < 500; ++fit.iterations) {
    const auto [b1, b2, b3, b4] = fit.map.beta;
    const double s4 = std::abs(b4);
    const double sign4 = b4 < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (pred[i] - b3) / s4;
      const double sig = 1.0 / (1.0 + std::exp(-z));
      const double ds = sig * (1.0 - sig);
      res[i] = fit.map(pred[i]) - mos[i];
      jac(i, 0) = sig;
      jac(i, 1) = 1.0 - sig;
      jac(i, 2) = -(b1 - b2) * ds / s4;
      jac(i, 3) = -(b1 - b2) * ds * z / s4 * sign4;
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d jtr = jac.transpose() * res;
    bool accepted = false;
    double improvement = 0.0;
    while (lambda < 1e12) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const Eigen::Vector4d delta = a.ldlt().solve(-jtr);
      Logistic4 trial = fit.map;
      for (int k = 0; k < 4; ++k) trial.beta[k] += delta[k];
      const double sse = trial.beta[3] != 0.0 ? Sse(trial, pred, mos) : INFINITY;
      if (std::isfinite(sse) && sse < fit.sse) {
        improvement = (fit.sse - sse) / std::max(fit.sse, 1e-300);
        fit.map = trial;
        fit.sse = sse;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || improvement < 1e-10) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

std::string EvalReport::SummaryLine() const {
  return "plcc=" + FormatDouble(plcc) + ",srcc=" + FormatDouble(srcc) +
         ",rmse=" + FormatDouble(rmse);
}

std::string EvalReport::Csv() const {
  std::string out = "sample_id,predicted,mapped,mos\n";
  for (const EvalRow& r : rows) {
    out += r.sample_id + "," + FormatDouble(r.predicted) + "," + FormatDouble(r.mapped) +
           "," + FormatDouble(r.mos) + "\n";
  }
  return out;
}

EvalReport Evaluate(std::span<const double> pred, std::span<const double> mos,
                    std::span<const std::string> ids) {
  if (ids.size() != pred.size()) Fail(ErrorCode::kLengthMismatch, "ids vs predictions");
  EvalReport report;
  report.fit = FitLogistic4(pred, mos);
  std::vector<double> mapped(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mapped[i] = report.fit.map(pred[i]);
    report.rows.push_back({ids[i], pred[i], mapped[i], mos[i]});
  }
  report.srcc = Srcc(pred, mos);
  report.rmse = Rmse(mapped, mos);
  // A fit that collapses to a constant carries no linear signal.
  report.plcc = IsConstant(mapped) ? 0.0 : Plcc(mapped, mos);
  return report;
}

}  // namespace pcqa
