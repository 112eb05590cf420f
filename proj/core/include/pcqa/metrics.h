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

#ifndef PCQA_METRICS_H_
#define PCQA_METRICS_H_

#include <array>
#include <span>
#include <string>
#include <vector>

namespace pcqa {

// Throw kLengthMismatch for unequal lengths or fewer than 3 points, and
// kConstantInput when a correlation argument has zero variance.
double Plcc(std::span<const double> x, std::span<const double> y);
double Srcc(std::span<const double> x, std::span<const double> y);
double Rmse(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> v);

// f(x) = b2 + (b1 - b2) / (1 + exp(-(x - b3) / |b4|))
struct Logistic4 {
  std::array<double, 4> beta = {1.0, 0.0, 0.0, 1.0};

  double operator()(double x) const;
};

struct LogisticFit {
  Logistic4 map;
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt on the squared error, initialized at
// (max mos, min mos, median pred, std pred). Stops once the relative SSE
// improvement of an accepted step falls below 1e-10, or after 500
// iterations (converged = false, best iterate kept).
// Throws kLengthMismatch (< 5 points) or kConstantInput.
LogisticFit FitLogistic4(std::span<const double> pred, std::span<const double> mos);

struct EvalRow {
  std::string sample_id;
  double predicted = 0.0;
  double mapped = 0.0;
  double mos = 0.0;
};

struct EvalReport {
  double plcc = 0.0;  // on mapped predictions
  double srcc = 0.0;  // on raw predictions
  double rmse = 0.0;  // on mapped predictions
  LogisticFit fit;
  std::vector<EvalRow> rows;

  std::string SummaryLine() const;  // plcc=...,srcc=...,rmse=...
  std::string Csv() const;
};

EvalReport Evaluate(std::span<const double> pred, std::span<const double> mos,
                    std::span<const std::string> ids);

}  // namespace pcqa

#endif  // PCQA_METRICS_H_
