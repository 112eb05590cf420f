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

#include "pcqa/vit.h"

#include <cmath>

#include "pcqa/error.h"

namespace pcqa {

NdArray RandomNormal(std::size_t rows, std::size_t cols, double stddev,
                     std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  NdArray a = NdArray::Zeros(rows, cols);
  for (double& v : a.values()) v = dist(rng);
  return a;
}

namespace {

Param Linear(const std::string& name, int in, int out, double gain,
             std::mt19937_64& rng, bool trainable) {
  return Param(name, RandomNormal(in, out, gain / std::sqrt(in), rng), trainable);
}

Param Constant(const std::string& name, int n, double v, bool trainable) {
  return Param(name, NdArray({1, static_cast<std::size_t>(n)}, v), trainable);
}

}  // namespace

TransformerBlock::TransformerBlock(const std::string& name, int dim, int heads,
                                   int hidden, int depth, std::mt19937_64& rng,
                                   bool trainable)
    : heads_(heads),
      ln1_gain_(Constant(name + ".ln1.gain", dim, 1.0, trainable)),
      ln1_bias_(Constant(name + ".ln1.bias", dim, 0.0, trainable)),
      qkv_w_(Linear(name + ".attn.qkv.w", dim, 3 * dim, 1.0, rng, trainable)),
      qv_b_(Constant(name + ".attn.qv.b", 2 * dim, 0.0, trainable)),
      qv_spread_(NdArray::Zeros(2 * static_cast<std::size_t>(dim), 3 * static_cast<std::size_t>(dim))),
      // Residual-branch outputs shrink with depth.
      proj_w_(Linear(name + ".attn.proj.w", dim, dim, 1.0 / std::sqrt(2.0 * depth),
                     rng, trainable)),
      proj_b_(Constant(name + ".attn.proj.b", dim, 0.0, trainable)),
      ln2_gain_(Constant(name + ".ln2.gain", dim, 1.0, trainable)),
      ln2_bias_(Constant(name + ".ln2.bias", dim, 0.0, trainable)),
      fc1_w_(Linear(name + ".mlp.fc1.w", dim, hidden, 1.0, rng, trainable)),
      fc1_b_(Constant(name + ".mlp.fc1.b", hidden, 0.0, trainable)),
      fc2_w_(Linear(name + ".mlp.fc2.w", hidden, dim, 1.0 / std::sqrt(2.0 * depth),
                    rng, trainable)),
      fc2_b_(Constant(name + ".mlp.fc2.b", dim, 0.0, trainable)) {
  const std::size_t c = static_cast<std::size_t>(dim);
  for (std::size_t j = 0; j < c; ++j) {
    qv_spread_.at(j, j) = 1.0;
    qv_spread_.at(c + j, 2 * c + j) = 1.0;
  }
}

Var TransformerBlock::Forward(Graph& g, Var x) {
  using namespace ad;
  Var h = LayerNorm(x, g.Parameter(ln1_gain_), g.Parameter(ln1_bias_));
  // Keys carry no bias: attention is invariant to it.
  Var qkv_bias = MatMul(g.Parameter(qv_b_), g.Constant(qv_spread_));
  Var qkv = AddRow(MatMul(h, g.Parameter(qkv_w_)), qkv_bias);
  Var attn = MultiHeadAttention(qkv, static_cast<std::size_t>(heads_));
  Var proj = AddRow(MatMul(attn, g.Parameter(proj_w_)), g.Parameter(proj_b_));
  Var z = Add(x, proj);
  Var h2 = LayerNorm(z, g.Parameter(ln2_gain_), g.Parameter(ln2_bias_));
  Var f1 = Gelu(AddRow(MatMul(h2, g.Parameter(fc1_w_)), g.Parameter(fc1_b_)));
  Var f2 = AddRow(MatMul(f1, g.Parameter(fc2_w_)), g.Parameter(fc2_b_));
  return Add(z, f2);
}

std::vector<Param*> TransformerBlock::params() {
  return {&ln1_gain_, &ln1_bias_, &qkv_w_,    &qv_b_,    &proj_w_, &proj_b_,
          &ln2_gain_, &ln2_bias_, &fc1_w_,    &fc1_b_,    &fc2_w_,  &fc2_b_};
}

void MiniViTConfig::Validate() const {
  if (patch_size < 1 || image_size < patch_size || image_size % patch_size != 0) {
    Fail(ErrorCode::kInvalidArgument, "image_size must be a multiple of patch_size");
  }
  if (dim < 1 || heads < 1 || dim % heads != 0) {
    Fail(ErrorCode::kInvalidArgument, "dim must be divisible by heads");
  }
  if (blocks < 1 || channels < 1 || hidden_dim() < 1) {
    Fail(ErrorCode::kInvalidArgument, "blocks, channels and MLP width must be positive");
  }
}

MiniViT::MiniViT(std::string name, const MiniViTConfig& config, std::uint64_t seed)
    : name_(std::move(name)), config_(config) {
  config_.Validate();
  std::mt19937_64 rng(seed);
  const int c = config_.dim;
  patch_w_ = Linear(name_ + ".patch_embed.w", config_.patch_dim(), c, 1.0, rng, true);
  patch_b_ = Constant(name_ + ".patch_embed.b", c, 0.0, true);
  class_token_ = Param(name_ + ".class_token", RandomNormal(1, c, 0.02, rng));
  pos_embed_ = Param(name_ + ".pos_embed",
                     RandomNormal(config_.num_patches() + 1, c, 0.02, rng));
  blocks_.reserve(config_.blocks);
  for (int l = 0; l < config_.blocks; ++l) {
    blocks_.emplace_back(name_ + ".block" + std::to_string(l), c, config_.heads,
                         config_.hidden_dim(), config_.blocks, rng, true);
  }
}

Var MiniViT::Forward(Graph& g, const NdArray& patches) {
  using namespace ad;
  const std::size_t n = static_cast<std::size_t>(config_.num_patches());
  if (patches.rows() != n || patches.cols() != static_cast<std::size_t>(config_.patch_dim())) {
    Fail(ErrorCode::kShapeMismatch, name_ + ": patches " + patches.ShapeString() +
                                        ", expected " + std::to_string(n) + "x" +
                                        std::to_string(config_.patch_dim()));
  }
  Var x = g.Constant(patches);
  Var emb = AddRow(MatMul(x, g.Parameter(patch_w_)), g.Parameter(patch_b_));
  const Var seq_parts[] = {g.Parameter(class_token_), emb};
  Var z = Add(ConcatRows(seq_parts), g.Parameter(pos_embed_));
  for (TransformerBlock& block : blocks_) z = block.Forward(g, z);
  return SliceRows(z, 1, n);
}

std::vector<Param*> MiniViT::params() {
  std::vector<Param*> out = {&patch_w_, &patch_b_, &class_token_, &pos_embed_};
  for (TransformerBlock& b : blocks_) {
    for (Param* p : b.params()) out.push_back(p);
  }
  return out;
}

std::size_t MiniViT::ParameterCount() {
  std::size_t n = 0;
  for (Param* p : params()) n += p->value.size();
  return n;
}

namespace {

template <typename PixelFn>
NdArray Patchify(const ViewImage& view, int patch_size, int channels, PixelFn&& pixel) {
  if (patch_size < 1 || view.height % patch_size != 0 || view.width % patch_size != 0) {
    Fail(ErrorCode::kShapeMismatch, "image not divisible into patches");
  }
  const int gh = view.height / patch_size, gw = view.width / patch_size;
  const std::size_t pd = static_cast<std::size_t>(patch_size) * patch_size * channels;
  NdArray out = NdArray::Zeros(static_cast<std::size_t>(gh) * gw, pd);
  double* dst = out.data();
  for (int py = 0; py < gh; ++py) {
    for (int px = 0; px < gw; ++px) {
      for (int y = 0; y < patch_size; ++y) {
        for (int x = 0; x < patch_size; ++x) {
          const std::size_t p = view.pixel(py * patch_size + y, px * patch_size + x);
          for (int ch = 0; ch < channels; ++ch) *dst++ = pixel(p, ch);
        }
      }
    }
  }
  return out;
}

}  // namespace

NdArray PatchifyColor(const ViewImage& view, int patch_size) {
  return Patchify(view, patch_size, 3, [&](std::size_t p, int ch) {
    return view.color[3 * p + ch] / 255.0;
  });
}

NdArray PatchifyDepth(const ViewImage& view, int patch_size) {
  return Patchify(view, patch_size, 1, [&](std::size_t p, int) {
    return static_cast<double>(view.depth[p]);
  });
}

}  // namespace pcqa
