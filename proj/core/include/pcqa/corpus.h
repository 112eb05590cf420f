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

#ifndef PCQA_CORPUS_H_
#define PCQA_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcqa/osd.h"
#include "pcqa/point_cloud.h"

namespace pcqa {

// Raw rating scale offered to (simulated) subjects: L equally spaced
// options from q_min to q_max.
struct ScoreScale {
  double q_min = 1.0;
  double q_max = 5.0;
  int options = 5;

  std::vector<double> Options() const;
};

struct OracleRating {
  double true_score = 0.0;
  OpinionScoreDistribution osd;  // over ScoreScale::Options(), ascending
};

// Per-kind offset applied to the level-derived score.
double KindScoreOffset(DistortionKind kind);

// Synthetic rater: the score falls linearly from q_max (level 1) to q_min
// (level 6), shifted by KindScoreOffset; the OSD is a Gaussian (sigma 0.7)
// evaluated at the options and renormalized.
OracleRating OracleOsd(DistortionKind kind, int level, const ScoreScale& scale);

struct CorpusSample {
  int sample_id = 0;
  int reference_id = 0;
  DistortionKind kind = DistortionKind::kGeomNoise;
  int level = 1;
  double true_score = 0.0;
  OpinionScoreDistribution osd_label;
  PointCloud cloud;
  std::string ply_path;  // relative to the corpus directory; may be empty
};

struct CorpusOptions {
  int references = 8;
  int points_per_reference = 4000;
  ScoreScale scale;
  std::uint64_t seed = 1;
};

// Procedural textured reference shape, normalized to the unit cube. Shape
// and texture cycle over eight families indexed by `reference_id`.
PointCloud MakeReferenceCloud(int reference_id, int points, std::uint64_t seed);

// references x 4 kinds x 6 levels samples. Sample i is distorted with seed
// (options.seed ^ i).
std::vector<CorpusSample> GenerateCorpus(const CorpusOptions& options);

// Writes one binary PLY per sample plus manifest.csv into `dir`:
//   sample_id,reference_id,kind,level,true_score,p1,...,pL,ply_path
void WriteCorpus(const std::filesystem::path& dir,
                 std::vector<CorpusSample>& samples);

// Reads manifest.csv and the referenced PLY files. `scale` supplies the
// option anchors for the p1..pL columns.
std::vector<CorpusSample> LoadCorpus(const std::filesystem::path& dir,
                                     const ScoreScale& scale);

std::string ManifestCsv(const std::vector<CorpusSample>& samples);

}  // namespace pcqa

#endif  // PCQA_CORPUS_H_
