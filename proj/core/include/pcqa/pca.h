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

#ifndef PCQA_PCA_H_
#define PCQA_PCA_H_

#include <array>
#include <vector>

#include "pcqa/ndarray.h"

namespace pcqa {

struct Pca2d {
  NdArray coords;                       // S x 2
  std::array<std::vector<double>, 2> axes;
  std::array<double, 2> variances = {0.0, 0.0};
  double total_variance = 0.0;
  bool rank_deficient = false;          // second component forced to zero
};

// Centers the rows of `features` (S x C) and projects them on the top two
// covariance eigenvectors, found by power iteration with deflation
// (tolerance 1e-10, at most 10^4 iterations). Each axis is signed so that
// its largest-magnitude entry is positive. Throws kLengthMismatch for S < 3.
Pca2d ComputePca2d(const NdArray& features);

}  // namespace pcqa

#endif  // PCQA_PCA_H_
