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

#ifndef PCQA_MODEL_H_
#define PCQA_MODEL_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pcqa/alignment.h"
#include "pcqa/autodiff.h"
#include "pcqa/losses.h"
#include "pcqa/ndarray.h"
#include "pcqa/osd.h"
#include "pcqa/projection.h"
#include "pcqa/text_encoder.h"
#include "pcqa/vit.h"

namespace pcqa {

// How the similarity logits are scaled before the softmax.
//   kUnit:      scale 1 (plain softmax over cosines)
//   kFixed:     a constant scale
//   kLearnable: exp(log_scale), log_scale trained, initialized at log(scale)
enum class ScaleMode { kUnit, kFixed, kLearnable };

std::string_view ScaleModeName(ScaleMode mode);
std::optional<ScaleMode> ParseScaleMode(std::string_view name);

struct ModelConfig {
  int crop = 64;
  int patch = 8;
  int dim = 32;
  int blocks = 2;
  int heads = 4;
  double mlp_ratio = 4.0;
  int views = 6;
  int context_tokens = 16;
  PromptPosition prompt_position = PromptPosition::kMiddle;
  int text_blocks = 2;
  int text_heads = 4;
  ScaleMode scale_mode = ScaleMode::kLearnable;
  double scale = 10.0;
  bool use_color = true;
  bool use_depth = true;
  bool use_text = true;
  QualityLevels levels = QualityLevels::Default();
  LossWeights weights;
  std::vector<double> thetas = {0.25, 0.50, 0.75};
  bool exclude_positive = false;

  // Throws kInvalidArgument on inconsistent settings.
  void Validate() const;
  MiniViTConfig VitConfig(int channels) const;
  bool contrastive_active() const {
    return use_color && use_depth && weights.beta > 0.0;
  }
};

// Patch matrices of the M cropped views of one sample.
struct SampleInput {
  std::vector<NdArray> color;  // M x (N x 3P^2)
  std::vector<NdArray> depth;  // M x (N x P^2)
};

// Crops every view to `crop` and patchifies both channels.
SampleInput MakeSampleInput(const ViewSet& views, int crop, int patch, CropMode mode,
                            std::uint64_t seed);

// Token maps of one sample: M entries per enabled modality, each N x C.
struct SampleTokens {
  std::vector<Var> color;
  std::vector<Var> depth;
};

// Mean over every token of every view and modality, F^I = (1/2MN) sum
// (f^c + f^d). Throws kShapeMismatch when the maps disagree in shape.
std::vector<double> FuseVisual(const std::vector<NdArray>& color_tokens,
                               const std::vector<NdArray>& depth_tokens);

struct LossBreakdown {
  double emd = 0.0;   // regression mode: mean squared error
  double quan = 0.0;
  double con = 0.0;
  double total = 0.0;
};

struct HeadResult {
  Var fused;   // B x C
  Var probs;   // B x K (text branch)
  Var score;   // B x 1
  Var loss;    // 1 x 1, present when labels were given
  LossBreakdown parts;
};

struct Prediction {
  OpinionScoreDistribution osd;  // empty with the regression head
  double score = 0.0;
  std::vector<double> feature;   // F^I
};

class QualityModel {
 public:
  QualityModel(const ModelConfig& config, std::uint64_t seed);

  QualityModel(const QualityModel&) = delete;
  QualityModel& operator=(const QualityModel&) = delete;

  const ModelConfig& config() const { return config_; }

  SampleTokens EncodeSample(Graph& g, const SampleInput& input);

  // Fusion, alignment and (with `labels`) the training loss over a batch.
  // `tokens` may live in `g` or be Input leaves spliced into it.
  HeadResult Head(Graph& g, const std::vector<SampleTokens>& tokens,
                  const std::vector<const OpinionScoreDistribution*>& labels);

  // K x C text features from the current prompts.
  NdArray TextFeatures();
  double CurrentScale();

  Prediction Predict(const SampleInput& input);

  // Every parameter, frozen ones included, in a stable order.
  std::vector<Param*> params();
  std::vector<Param*> trainable_params();

  MiniViT& color_encoder() { return color_vit_; }
  MiniViT& depth_encoder() { return depth_vit_; }
  FrozenTextEncoder& text_encoder() { return text_; }
  PromptSet& prompts() { return prompts_; }
  RegressionHead& regression_head() { return head_; }
  Param& log_scale() { return log_scale_; }

 private:
  Var ScaleVar(Graph& g);

  ModelConfig config_;
  MiniViT color_vit_;
  MiniViT depth_vit_;
  FrozenTextEncoder text_;
  PromptSet prompts_;
  RegressionHead head_;
  Param log_scale_;
};

// Mean over rows of a B x K probability matrix of the EMD to each label.
Var EmdLossOp(Var probs, std::span<const double> anchors,
              const std::vector<const OpinionScoreDistribution*>& labels);
Var QuantileLossOp(Var probs, std::span<const double> anchors,
                   const std::vector<const OpinionScoreDistribution*>& labels,
                   std::span<const double> thetas);
// InfoNCE between row-aligned color and depth feature rows.
Var ContrastiveLossOp(Var color_rows, Var depth_rows, double tau1, bool exclude_positive);

}  // namespace pcqa

#endif  // PCQA_MODEL_H_
