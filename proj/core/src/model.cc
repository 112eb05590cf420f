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

#include "pcqa/model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcqa/error.h"

namespace pcqa {

namespace {

// Text-side weights stand in for a pretrained encoder, so they come from a
// fixed table rather than the run seed.
constexpr std::uint64_t kTextSeed = 0x5eed7e47c11b0001ULL;
constexpr std::uint64_t kPromptSeed = 0x5eed7e47c11b0002ULL;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(seed ^ SplitMix64(stream));
}

TextEncoderConfig TextConfig(const ModelConfig& c) {
  TextEncoderConfig t;
  t.dim = c.dim;
  t.out_dim = c.dim;
  t.blocks = c.text_blocks;
  t.heads = c.text_heads;
  t.mlp_ratio = c.mlp_ratio;
  t.max_tokens = std::max(77, c.context_tokens + 1);
  return t;
}

void CheckLabels(const NdArray& probs,
                 const std::vector<const OpinionScoreDistribution*>& labels) {
  if (labels.size() != probs.rows()) {
    Fail(ErrorCode::kLengthMismatch, "labels vs batch rows");
  }
}

OpinionScoreDistribution RowOsd(const NdArray& probs, std::size_t row,
                                std::span<const double> anchors) {
  OpinionScoreDistribution osd;
  osd.anchors.assign(anchors.begin(), anchors.end());
  osd.probs.assign(probs.data() + row * probs.cols(),
                   probs.data() + (row + 1) * probs.cols());
  return osd;
}

}  // namespace

std::string_view ScaleModeName(ScaleMode mode) {
  switch (mode) {
    case ScaleMode::kUnit: return "unit";
    case ScaleMode::kFixed: return "fixed";
    case ScaleMode::kLearnable: return "learnable";
  }
  return "unit";
}

std::optional<ScaleMode> ParseScaleMode(std::string_view name) {
  for (ScaleMode m : {ScaleMode::kUnit, ScaleMode::kFixed, ScaleMode::kLearnable}) {
    if (ScaleModeName(m) == name) return m;
  }
  return std::nullopt;
}

void ModelConfig::Validate() const {
  VitConfig(3).Validate();
  if (views < 1) Fail(ErrorCode::kInvalidArgument, "need at least one view");
  if (prompt_position == PromptPosition::kMiddle && context_tokens % 2 != 0) {
    Fail(ErrorCode::kOddContextLength, "middle prompts need an even context length");
  }
  if (!use_color && !use_depth) {
    Fail(ErrorCode::kInvalidArgument, "at least one visual branch must be enabled");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    Fail(ErrorCode::kInvalidArgument, "scale must be positive");
  }
  if (weights.alpha < 0 || weights.beta < 0 || !(weights.tau1 > 0)) {
    Fail(ErrorCode::kInvalidArgument, "loss weights must be >= 0 and tau1 > 0");
  }
  levels.Validate();
  for (double t : thetas) {
    if (!(t > 0.0 && t < 1.0)) Fail(ErrorCode::kThetaOutOfRange, "theta outside (0, 1)");
  }
}

MiniViTConfig ModelConfig::VitConfig(int channels) const {
  MiniViTConfig v;
  v.image_size = crop;
  v.patch_size = patch;
  v.dim = dim;
  v.blocks = blocks;
  v.heads = heads;
  v.mlp_ratio = mlp_ratio;
  v.channels = channels;
  return v;
}

SampleInput MakeSampleInput(const ViewSet& views, int crop, int patch, CropMode mode,
                            std::uint64_t seed) {
  SampleInput in;
  for (std::size_t m = 0; m < views.views.size(); ++m) {
    const ViewImage patch_view =
        CropPatch(views.views[m], crop, mode, DeriveSeed(seed, m));
    in.color.push_back(PatchifyColor(patch_view, patch));
    in.depth.push_back(PatchifyDepth(patch_view, patch));
  }
  return in;
}

std::vector<double> FuseVisual(const std::vector<NdArray>& color_tokens,
                               const std::vector<NdArray>& depth_tokens) {
  if (color_tokens.size() != depth_tokens.size() || color_tokens.empty()) {
    Fail(ErrorCode::kShapeMismatch, "fusion needs the same non-zero view count");
  }
  const NdArray& first = color_tokens.front();
  std::vector<double> out(first.cols(), 0.0);
  std::size_t count = 0;
  for (const auto* maps : {&color_tokens, &depth_tokens}) {
    for (const NdArray& t : *maps) {
      if (!t.SameShape(first)) {
        Fail(ErrorCode::kShapeMismatch, "token map " + t.ShapeString() + " vs " +
                                            first.ShapeString());
      }
      for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.cols(); ++c) out[c] += t.at(r, c);
      }
      count += t.rows();
    }
  }
  for (double& v : out) v /= static_cast<double>(count);
  return out;
}

QualityModel::QualityModel(const ModelConfig& config, std::uint64_t seed)
    : config_((config.Validate(), config)),
      color_vit_("color", config.VitConfig(3), DeriveSeed(seed, 1)),
      depth_vit_("depth", config.VitConfig(1), DeriveSeed(seed, 2)),
      text_(TextConfig(config), kTextSeed),
      prompts_(config.context_tokens, static_cast<int>(config.levels.size()), config.dim,
               config.prompt_position, kPromptSeed),
      head_(config.dim, DeriveSeed(seed, 3)),
      log_scale_("logit_scale", NdArray({1, 1}, std::log(config.scale)),
                 config.scale_mode == ScaleMode::kLearnable) {}

SampleTokens QualityModel::EncodeSample(Graph& g, const SampleInput& input) {
  if (input.color.size() != static_cast<std::size_t>(config_.views) ||
      input.depth.size() != static_cast<std::size_t>(config_.views)) {
    Fail(ErrorCode::kShapeMismatch, "sample has " + std::to_string(input.color.size()) +
                                        " views, expected " +
                                        std::to_string(config_.views));
  }
  SampleTokens t;
  for (int m = 0; m < config_.views; ++m) {
    if (config_.use_color) t.color.push_back(color_vit_.Forward(g, input.color[m]));
    if (config_.use_depth) t.depth.push_back(depth_vit_.Forward(g, input.depth[m]));
  }
  return t;
}

Var QualityModel::ScaleVar(Graph& g) {
  switch (config_.scale_mode) {
    case ScaleMode::kUnit: return g.Constant(NdArray({1, 1}, 1.0));
    case ScaleMode::kFixed: return g.Constant(NdArray({1, 1}, config_.scale));
    case ScaleMode::kLearnable: return ad::Exp(g.Parameter(log_scale_));
  }
  return g.Constant(NdArray({1, 1}, 1.0));
}

HeadResult QualityModel::Head(Graph& g, const std::vector<SampleTokens>& tokens,
                              const std::vector<const OpinionScoreDistribution*>& labels) {
  using namespace ad;
  if (tokens.empty()) Fail(ErrorCode::kInvalidArgument, "empty batch");
  HeadResult r;
  std::vector<Var> fused_rows;
  for (const SampleTokens& s : tokens) {
    std::vector<Var> maps(s.color.begin(), s.color.end());
    maps.insert(maps.end(), s.depth.begin(), s.depth.end());
    fused_rows.push_back(MeanOverAxis(ConcatRows(maps), 0));
  }
  r.fused = ConcatRows(fused_rows);

  const bool with_loss = !labels.empty();
  if (with_loss && labels.size() != tokens.size()) {
    Fail(ErrorCode::kLengthMismatch, "labels vs batch size");
  }
  const std::span<const double> anchors(config_.levels.q);
  std::vector<Var> terms;
  if (config_.use_text) {
    Var text = text_.Encode(g, prompts_);
    r.probs = SoftmaxLastDim(ScaleBy(CosineSim(r.fused, text), ScaleVar(g)));
    r.score = MatMul(r.probs, g.Constant(NdArray({anchors.size(), 1},
                                                 std::vector<double>(anchors.begin(),
                                                                     anchors.end()))));
    if (with_loss) {
      Var emd = EmdLossOp(r.probs, anchors, labels);
      r.parts.emd = emd.scalar();
      terms.push_back(emd);
      if (config_.weights.alpha > 0.0) {
        Var quan = QuantileLossOp(r.probs, anchors, labels, config_.thetas);
        r.parts.quan = quan.scalar();
        terms.push_back(Scale(quan, config_.weights.alpha));
      }
    }
  } else {
    std::vector<Var> scores;
    for (std::size_t b = 0; b < tokens.size(); ++b) {
      scores.push_back(head_.Forward(g, SliceRows(r.fused, b, 1)));
    }
    r.score = ConcatRows(scores);
    if (with_loss) {
      NdArray mos = NdArray::Zeros(tokens.size(), 1);
      for (std::size_t b = 0; b < tokens.size(); ++b) mos[b] = labels[b]->Mean();
      Var mse = MeanAll(Square(Sub(r.score, g.Constant(std::move(mos)))));
      r.parts.emd = mse.scalar();
      terms.push_back(mse);
    }
  }

  if (with_loss && config_.contrastive_active()) {
    std::vector<Var> color_rows, depth_rows;
    for (const SampleTokens& s : tokens) {
      for (Var v : s.color) color_rows.push_back(Reshape(v, 1, v.value().size()));
      for (Var v : s.depth) depth_rows.push_back(Reshape(v, 1, v.value().size()));
    }
    Var con = ContrastiveLossOp(ConcatRows(color_rows), ConcatRows(depth_rows),
                                config_.weights.tau1, config_.exclude_positive);
    r.parts.con = con.scalar();
    terms.push_back(Scale(con, config_.weights.beta));
  }

  if (with_loss) {
    r.loss = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) r.loss = Add(r.loss, terms[i]);
    r.parts.total = r.loss.scalar();
  }
  return r;
}

NdArray QualityModel::TextFeatures() {
  Graph g;
  return text_.Encode(g, prompts_).value();
}

double QualityModel::CurrentScale() {
  Graph g;
  return ScaleVar(g).scalar();
}

Prediction QualityModel::Predict(const SampleInput& input) {
  Graph g;
  const std::vector<SampleTokens> tokens = {EncodeSample(g, input)};
  const HeadResult r = Head(g, tokens, {});
  Prediction p;
  const NdArray& f = r.fused.value();
  p.feature.assign(f.data(), f.data() + f.size());
  if (config_.use_text) {
    p.osd = RowOsd(r.probs.value(), 0, config_.levels.q);
    p.score = ScoreFromOsd(p.osd, config_.levels);
  } else {
    p.score = r.score.scalar();
  }
  return p;
}

std::vector<Param*> QualityModel::params() {
  std::vector<Param*> out = color_vit_.params();
  for (Param* p : depth_vit_.params()) out.push_back(p);
  out.push_back(&prompts_.context());
  out.push_back(&prompts_.adjectives());
  for (Param* p : text_.params()) out.push_back(p);
  for (Param* p : head_.params()) out.push_back(p);
  out.push_back(&log_scale_);
  return out;
}

std::vector<Param*> QualityModel::trainable_params() {
  std::vector<Param*> out;
  for (Param* p : params()) {
    if (p->trainable) out.push_back(p);
  }
  return out;
}

Var EmdLossOp(Var probs, std::span<const double> anchors,
              const std::vector<const OpinionScoreDistribution*>& labels) {
  const NdArray& pv = probs.value();
  CheckLabels(pv, labels);
  const std::size_t b = pv.rows(), k = pv.cols();
  NdArray grad = NdArray::Zeros(b, k);
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const DistributionLoss l = EmdLoss(RowOsd(pv, i, anchors), *labels[i]);
    total += l.value / static_cast<double>(b);
    for (std::size_t j = 0; j < k; ++j) grad.at(i, j) = l.grad_pred[j] / static_cast<double>(b);
  }
  Graph* g = probs.graph();
  const Var inputs[] = {probs};
  return g->Add(NdArray({1, 1}, total), inputs,
                [g, probs, grad = std::move(grad)](const NdArray& dy) {
                  NdArray& dst = g->MutableGrad(probs);
                  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += dy[0] * grad[i];
                });
}

Var QuantileLossOp(Var probs, std::span<const double> anchors,
                   const std::vector<const OpinionScoreDistribution*>& labels,
                   std::span<const double> thetas) {
  const NdArray& pv = probs.value();
  CheckLabels(pv, labels);
  const std::size_t b = pv.rows(), k = pv.cols();
  NdArray grad = NdArray::Zeros(b, k);
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const DistributionLoss l = QuantileLoss(RowOsd(pv, i, anchors), *labels[i], thetas);
    total += l.value / static_cast<double>(b);
    for (std::size_t j = 0; j < k; ++j) grad.at(i, j) = l.grad_pred[j] / static_cast<double>(b);
  }
  Graph* g = probs.graph();
  const Var inputs[] = {probs};
  return g->Add(NdArray({1, 1}, total), inputs,
                [g, probs, grad = std::move(grad)](const NdArray& dy) {
                  NdArray& dst = g->MutableGrad(probs);
                  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += dy[0] * grad[i];
                });
}

Var ContrastiveLossOp(Var color_rows, Var depth_rows, double tau1, bool exclude_positive) {
  ContrastiveResult c =
      ContrastiveLoss(color_rows.value(), depth_rows.value(), tau1, exclude_positive);
  Graph* g = color_rows.graph();
  const Var inputs[] = {color_rows, depth_rows};
  return g->Add(NdArray({1, 1}, c.value), inputs,
                [g, color_rows, depth_rows, gc = std::move(c.grad_color),
                 gd = std::move(c.grad_depth)](const NdArray& dy) {
                  if (g->requires_grad(color_rows.id())) {
                    NdArray& dst = g->MutableGrad(color_rows);
                    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += dy[0] * gc[i];
                  }
                  if (g->requires_grad(depth_rows.id())) {
                    NdArray& dst = g->MutableGrad(depth_rows);
                    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += dy[0] * gd[i];
                  }
                });
}

}  // namespace pcqa
