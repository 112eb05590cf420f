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

#include "gradient_suite.h"

#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "pcqa/autodiff.h"
#include "pcqa/corpus.h"
#include "pcqa/losses.h"
#include "pcqa/model.h"
#include "pcqa/text_encoder.h"
#include "pcqa/vit.h"

namespace pcqa {

namespace {

using Builder = std::function<Var(Graph&)>;

// Scalar probe: sum((out + w)^2) for a fixed random offset w, so every
// output entry carries a distinct gradient.
class Probe {
 public:
  explicit Probe(std::uint64_t seed) : rng_(seed) {}

  Param MakeParam(const std::string& name, std::size_t rows, std::size_t cols,
                  double stddev = 1.0) {
    return Param(name, RandomNormal(rows, cols, stddev, rng_));
  }

  ScalarLossFn Loss(Builder build) {
    auto weights = std::make_shared<NdArray>();
    auto rng = std::make_shared<std::mt19937_64>(rng_());
    return [build, weights, rng](bool with_grad) {
      Graph g;
      Var out = build(g);
      if (weights->size() != out.value().size()) {
        *weights = RandomNormal(out.rows(), out.cols(), 1.0, *rng);
      }
      Var w = g.Constant(*weights);
      Var loss = out.value().size() == 1 ? out : ad::SumAll(ad::Square(ad::Add(out, w)));
      if (with_grad) {
        g.Backward(loss);
        g.AccumulateParamGrads();
      }
      return loss.scalar();
    };
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

OpinionScoreDistribution RandomOsd(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  OpinionScoreDistribution osd;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    osd.probs.push_back(u(rng));
    osd.anchors.push_back(static_cast<double>(i + 1));
    sum += osd.probs.back();
  }
  for (double& p : osd.probs) p /= sum;
  return osd;
}

ModelConfig SmallModel() {
  ModelConfig c;
  c.crop = 16;
  c.patch = 8;
  c.dim = 16;
  c.blocks = 2;
  c.heads = 4;
  c.views = 6;
  c.context_tokens = 4;
  c.text_blocks = 2;
  c.text_heads = 4;
  return c;
}

}  // namespace

std::vector<SuiteEntry> RunGradientSuite(std::uint64_t seed, const GradCheckOptions& options) {
  std::vector<SuiteEntry> out;
  Probe probe(seed);
  auto check = [&](const std::string& name, const ScalarLossFn& fn,
                   std::vector<Param*> params) {
    out.push_back({name, GradCheck(fn, params, options)});
  };

  {
    Param a = probe.MakeParam("a", 4, 5), b = probe.MakeParam("b", 5, 3);
    Param row = probe.MakeParam("row", 1, 3), c = probe.MakeParam("c", 4, 3);
    check("matmul/add/scale", probe.Loss([&](Graph& g) {
            Var ab = ad::MatMul(g.Parameter(a), g.Parameter(b));
            return ad::Scale(ad::Add(ad::AddRow(ab, g.Parameter(row)), g.Parameter(c)), 0.7);
          }),
          {&a, &b, &row, &c});
    Param sq = probe.MakeParam("sq", 4, 4);
    check("mean_over_axis", probe.Loss([&](Graph& g) {
            const Var parts[] = {ad::MeanOverAxis(g.Parameter(sq), 0),
                                 ad::Reshape(ad::MeanOverAxis(g.Parameter(sq), 1), 1, 4)};
            return ad::ConcatRows(parts);
          }),
          {&sq});
  }
  {
    Param x = probe.MakeParam("x", 5, 8), gain = probe.MakeParam("gain", 1, 8);
    Param bias = probe.MakeParam("bias", 1, 8);
    check("layer_norm", probe.Loss([&](Graph& g) {
            return ad::LayerNorm(g.Parameter(x), g.Parameter(gain), g.Parameter(bias));
          }),
          {&x, &gain, &bias});
    check("softmax_lastdim", probe.Loss([&](Graph& g) {
            return ad::SoftmaxLastDim(g.Parameter(x));
          }),
          {&x});
    check("gelu", probe.Loss([&](Graph& g) { return ad::Gelu(g.Parameter(x)); }), {&x});
    Param y = probe.MakeParam("y", 3, 8);
    check("cosine_sim", probe.Loss([&](Graph& g) {
            return ad::CosineSim(g.Parameter(x), g.Parameter(y));
          }),
          {&x, &y});
    Param qkv = probe.MakeParam("qkv", 5, 24, 0.5);
    check("multi_head_attention", probe.Loss([&](Graph& g) {
            return ad::MultiHeadAttention(g.Parameter(qkv), 2);
          }),
          {&qkv});
  }
  {
    auto block = std::make_shared<TransformerBlock>("block", 8, 2, 16, 1, probe.rng(), true);
    Param x = probe.MakeParam("x", 6, 8);
    std::vector<Param*> params = block->params();
    params.push_back(&x);
    check("vit_block", probe.Loss([&](Graph& g) { return block->Forward(g, g.Parameter(x)); }),
          params);
  }
  {
    MiniViTConfig vc;
    vc.image_size = 16;
    vc.patch_size = 8;
    vc.dim = 8;
    vc.blocks = 2;
    vc.heads = 2;
    vc.channels = 3;
    auto vit = std::make_shared<MiniViT>("vit", vc, probe.rng()());
    const NdArray patches = RandomNormal(4, 192, 0.3, probe.rng());
    check("vit_forward", probe.Loss([&](Graph& g) { return vit->Forward(g, patches); }),
          vit->params());
  }
  {
    Param c1 = probe.MakeParam("c1", 4, 8), c2 = probe.MakeParam("c2", 4, 8);
    Param d1 = probe.MakeParam("d1", 4, 8), d2 = probe.MakeParam("d2", 4, 8);
    check("fusion", probe.Loss([&](Graph& g) {
            const Var maps[] = {g.Parameter(c1), g.Parameter(c2), g.Parameter(d1),
                                g.Parameter(d2)};
            return ad::MeanOverAxis(ad::ConcatRows(maps), 0);
          }),
          {&c1, &c2, &d1, &d2});
  }
  {
    TextEncoderConfig tc;
    tc.dim = 8;
    tc.out_dim = 8;
    tc.heads = 2;
    auto text = std::make_shared<FrozenTextEncoder>(tc, probe.rng()());
    auto prompts = std::make_shared<PromptSet>(4, 5, 8, PromptPosition::kMiddle, probe.rng()());
    check("text_path", probe.Loss([&](Graph& g) { return text->Encode(g, *prompts); }),
          {&prompts->context()});
  }
  {
    // Softmax OSD and both distribution losses, through logits.
    Param image = probe.MakeParam("image", 2, 8), text = probe.MakeParam("text", 5, 8);
    Param log_scale("log_scale", NdArray({1, 1}, std::log(3.0)));
    const std::vector<double> anchors = {5, 4, 3, 2, 1};
    auto osd_a = std::make_shared<OpinionScoreDistribution>(RandomOsd(probe.rng(), 5));
    auto osd_b = std::make_shared<OpinionScoreDistribution>(RandomOsd(probe.rng(), 5));
    auto probs = [&](Graph& g) {
      Var sims = ad::CosineSim(g.Parameter(image), g.Parameter(text));
      return ad::SoftmaxLastDim(ad::ScaleBy(sims, ad::Exp(g.Parameter(log_scale))));
    };
    check("softmax_osd", probe.Loss(probs), {&image, &text, &log_scale});
    check("emd_loss", probe.Loss([&](Graph& g) {
            return EmdLossOp(probs(g), anchors, {osd_a.get(), osd_b.get()});
          }),
          {&image, &text, &log_scale});
    check("quantile_loss", probe.Loss([&](Graph& g) {
            return QuantileLossOp(probs(g), anchors, {osd_a.get(), osd_b.get()},
                                  kDefaultThetas);
          }),
          {&image, &text, &log_scale});
  }
  {
    Param c = probe.MakeParam("color_rows", 6, 12), d = probe.MakeParam("depth_rows", 6, 12);
    check("contrastive_loss", probe.Loss([&](Graph& g) {
            return ContrastiveLossOp(g.Parameter(c), g.Parameter(d), 0.07, false);
          }),
          {&c, &d});
    check("contrastive_loss_exclusive", probe.Loss([&](Graph& g) {
            return ContrastiveLossOp(g.Parameter(c), g.Parameter(d), 0.07, true);
          }),
          {&c, &d});
  }
  {
    // Full training loss on a two-sample batch.
    const ModelConfig mc = SmallModel();
    auto model = std::make_shared<QualityModel>(mc, probe.rng()());
    std::vector<SampleInput> inputs;
    std::vector<OpinionScoreDistribution> labels;
    const ScoreScale scale;
    for (int i = 0; i < 2; ++i) {
      const PointCloud cloud = MakeReferenceCloud(i, 600, seed + static_cast<std::uint64_t>(i));
      const ViewSet views = RenderViews(cloud, mc.views, 32, 32, 1);
      inputs.push_back(MakeSampleInput(views, mc.crop, mc.patch, CropMode::kRandom, seed + i));
      labels.push_back(OracleOsd(DistortionKind::kGeomNoise, 2 + 3 * i, scale).osd);
    }
    auto fn = [model, inputs, labels](bool with_grad) {
      Graph g;
      std::vector<SampleTokens> tokens;
      for (const SampleInput& in : inputs) tokens.push_back(model->EncodeSample(g, in));
      const HeadResult r = model->Head(g, tokens, {&labels[0], &labels[1]});
      if (with_grad) {
        g.Backward(r.loss);
        g.AccumulateParamGrads();
      }
      return r.loss.scalar();
    };
    check("total_loss", fn, model->params());
  }
  return out;
}

}  // namespace pcqa
