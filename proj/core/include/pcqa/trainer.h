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

#ifndef PCQA_TRAINER_H_
#define PCQA_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pcqa/checkpoint.h"
#include "pcqa/corpus.h"
#include "pcqa/model.h"
#include "pcqa/optimizer.h"

namespace pcqa {

struct RenderOptions {
  int size = 256;
  int radius = -1;  // -1 picks DefaultSplatRadius
};

struct TrainOptions {
  int batch = 8;
  int epochs = 30;
  AdamOptions adam;
  int threads = 1;
  std::uint64_t seed = 1;
  RenderOptions render;
};

struct TraceRow {
  int epoch = 0;  // 1-based
  int step = 0;   // within the epoch, 0-based
  LossBreakdown loss;
};

// Normalizes the cloud to the unit cube and renders its M views with the
// configured splat radius.
ViewSet RenderSample(const PointCloud& cloud, int views, const RenderOptions& render);

// Training-time input: random crops drawn from a stream keyed by
// (seed, sample_id, epoch).
SampleInput TrainingInput(const CorpusSample& sample, const ModelConfig& model,
                          const RenderOptions& render, std::uint64_t seed, int epoch);
// Evaluation input: center crops.
SampleInput EvalInput(const PointCloud& cloud, const ModelConfig& model,
                      const RenderOptions& render);

// Owns the optimization state for one model over one training split.
// Results do not depend on the thread count: per-sample work is
// independent and gradients are reduced in batch order.
class Trainer {
 public:
  Trainer(QualityModel& model, const TrainOptions& options,
          const std::vector<CorpusSample>& corpus, std::vector<std::size_t> train_indices,
          std::uint64_t config_hash);

  // One pass over the training split; returns the sample-weighted mean
  // total loss of the epoch.
  double RunEpoch();
  // Runs epochs until `options.epochs` have completed.
  void Run();

  // One optimization step on the given samples, with an explicit epoch
  // used for the crop streams. Returns the loss breakdown.
  LossBreakdown Step(const std::vector<std::size_t>& batch, int epoch);

  int epochs_done() const { return epoch_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }
  double best_loss() const { return best_loss_; }
  int best_epoch() const { return best_epoch_; }

  // Current parameters, optimizer moments, epoch, seed, loss trace and the
  // parameters of the lowest-loss epoch (prefixed "best/").
  Checkpoint Save() const;
  // Restores everything Save() writes. Throws kHashMismatch on a
  // configuration mismatch and kShapeMismatch on incompatible blocks.
  void Restore(const Checkpoint& ckpt);

 private:
  QualityModel& model_;
  TrainOptions options_;
  const std::vector<CorpusSample>& corpus_;
  std::vector<std::size_t> train_;
  std::uint64_t config_hash_;
  std::vector<Param*> params_;
  AdamW adam_;
  int epoch_ = 0;
  std::vector<TraceRow> trace_;
  std::vector<double> epoch_losses_;
  double best_loss_ = 0.0;
  int best_epoch_ = 0;
  std::vector<NdArray> best_params_;
};

std::string TraceCsv(const std::vector<TraceRow>& trace);

// Writes all parameter values (and their frozen flags) into `ckpt`.
void StoreParams(QualityModel& model, Checkpoint& ckpt, const std::string& prefix = "");
// Loads parameter values from blocks named prefix + param name.
// Throws kInvalidArgument (missing) or kShapeMismatch.
void LoadParams(QualityModel& model, const Checkpoint& ckpt, const std::string& prefix = "");
// Prefers the "best/" snapshot when present.
void LoadBestParams(QualityModel& model, const Checkpoint& ckpt);

struct SamplePrediction {
  int sample_id = 0;
  Prediction prediction;
};

std::vector<SamplePrediction> PredictSamples(QualityModel& model,
                                             const std::vector<CorpusSample>& corpus,
                                             const std::vector<std::size_t>& indices,
                                             const RenderOptions& render, int threads = 1);

}  // namespace pcqa

#endif  // PCQA_TRAINER_H_
