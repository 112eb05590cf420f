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

#ifndef PCQA_CONFIG_H_
#define PCQA_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pcqa/corpus.h"
#include "pcqa/model.h"
#include "pcqa/trainer.h"

namespace pcqa {

struct GradCheckSettings {
  double step = 1e-5;
  int samples = 64;
};

// Every tunable of the pipeline. Text form: one `section.key = value` per
// line, `#` starts a comment, lists are comma separated. Unknown or
// repeated keys and unparsable values throw kConfig.
struct RunConfig {
  CorpusOptions corpus;
  ModelConfig model;
  TrainOptions train;
  int folds = 5;
  GradCheckSettings gradcheck;

  static RunConfig Parse(std::string_view text);
  static RunConfig Load(const std::filesystem::path& path);

  // All keys, sorted, `key = value` per line.
  std::string Canonical() const;
  // FNV-1a over the canonical form without the keys that only control
  // run length or parallelism (train.epochs, train.threads).
  std::uint64_t Hash() const;
  // Settings that differ from the reference configuration of the method.
  std::vector<std::string> Deviations() const;

  void SetSeed(std::uint64_t seed);
  void Validate() const;
};

std::string RunMetadata(const RunConfig& config, std::string_view command);

}  // namespace pcqa

#endif  // PCQA_CONFIG_H_
