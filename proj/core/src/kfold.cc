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

#include "pcqa/kfold.h"

#include <algorithm>
#include <random>
#include <string>

#include "pcqa/error.h"

namespace pcqa {

std::vector<FoldSplit> KFoldSplit(std::span<const int> reference_ids, int k,
                                  std::uint64_t seed) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "k-fold needs k >= 2");
  std::vector<int> refs(reference_ids.begin(), reference_ids.end());
  std::sort(refs.begin(), refs.end());
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
  if (static_cast<std::size_t>(k) > refs.size()) {
    Fail(ErrorCode::kTooFewReferences, std::to_string(refs.size()) +
                                           " references cannot fill " +
                                           std::to_string(k) + " folds");
  }
  // Fisher-Yates with an explicit draw so the order does not depend on the
  // standard library's shuffle.
  std::mt19937_64 rng(seed);
  for (std::size_t i = refs.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(refs[i], refs[j]);
  }
  std::vector<FoldSplit> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    folds[i % folds.size()].test_references.push_back(refs[i]);
  }
  for (FoldSplit& f : folds) {
    std::sort(f.test_references.begin(), f.test_references.end());
    for (std::size_t s = 0; s < reference_ids.size(); ++s) {
      const bool held_out = std::binary_search(f.test_references.begin(),
                                               f.test_references.end(), reference_ids[s]);
      (held_out ? f.test : f.train).push_back(s);
    }
  }
  return folds;
}

}  // namespace pcqa
