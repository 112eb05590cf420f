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

#ifndef PCQA_KFOLD_H_
#define PCQA_KFOLD_H_

#include <cstdint>
#include <span>
#include <vector>

namespace pcqa {

struct FoldSplit {
  std::vector<std::size_t> train;  // sample indices
  std::vector<std::size_t> test;
  std::vector<int> test_references;
};

// Content-grouped k-fold: distinct reference ids are sorted, shuffled with
// `seed`, and dealt round-robin to k folds. Fold i tests on its references
// and trains on the rest. Throws kTooFewReferences if k exceeds the number
// of distinct references, kInvalidArgument if k < 2.
std::vector<FoldSplit> KFoldSplit(std::span<const int> reference_ids, int k,
                                  std::uint64_t seed);

}  // namespace pcqa

#endif  // PCQA_KFOLD_H_
