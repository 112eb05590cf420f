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

#ifndef PCQA_VIT_H_
#define PCQA_VIT_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pcqa/autodiff.h"
#include "pcqa/ndarray.h"
#include "pcqa/projection.h"

namespace pcqa {

// Pre-norm transformer block:
//   z' = MSA(LN(z)) + z
//   z  = MLP(LN(z')) + z'      with MLP = Linear -> GELU -> Linear
// The key projection has no bias.
class TransformerBlock {
 public:
  TransformerBlock(const std::string& name, int dim, int heads, int hidden,
                   int depth, std::mt19937_64& rng, bool trainable);

  Var Forward(Graph& g, Var x);
  std::vector<Param*> params();

 private:
  int heads_;
  Param ln1_gain_, ln1_bias_;
  Param qkv_w_;
  Param qv_b_;         // query and value biases
  NdArray qv_spread_;  // places qv_b_ into the [Q | K | V] layout
  Param proj_w_, proj_b_;
  Param ln2_gain_, ln2_bias_;
  Param fc1_w_, fc1_b_;
  Param fc2_w_, fc2_b_;
};

struct MiniViTConfig {
  int image_size = 64;
  int patch_size = 8;
  int dim = 32;
  int blocks = 2;
  int heads = 4;
  double mlp_ratio = 4.0;
  int channels = 3;

  int grid() const { return image_size / patch_size; }
  int num_patches() const { return grid() * grid(); }
  int patch_dim() const { return patch_size * patch_size * channels; }
  int hidden_dim() const { return static_cast<int>(dim * mlp_ratio); }
  // Throws kInvalidArgument on indivisible sizes.
  void Validate() const;
};

// Patch-token vision transformer. Forward returns the last-layer tokens of
// the N patches; the class token takes part in attention but is dropped
// from the output.
class MiniViT {
 public:
  MiniViT(std::string name, const MiniViTConfig& config, std::uint64_t seed);

  MiniViT(const MiniViT&) = delete;
  MiniViT& operator=(const MiniViT&) = delete;

  // `patches` is N x patch_dim (see Patchify*). Returns N x dim.
  Var Forward(Graph& g, const NdArray& patches);

  const MiniViTConfig& config() const { return config_; }
  std::vector<Param*> params();
  std::size_t ParameterCount();

 private:
  std::string name_;
  MiniViTConfig config_;
  Param patch_w_, patch_b_;
  Param class_token_;
  Param pos_embed_;
  std::vector<TransformerBlock> blocks_;
};

// Flattens non-overlapping patches in raster order. Each row is one patch,
// pixels in raster order, channels innermost. Color is scaled to [0,1].
NdArray PatchifyColor(const ViewImage& view, int patch_size);
NdArray PatchifyDepth(const ViewImage& view, int patch_size);

// Random normal matrix helper shared by the encoders.
NdArray RandomNormal(std::size_t rows, std::size_t cols, double stddev,
                     std::mt19937_64& rng);

}  // namespace pcqa

#endif  // PCQA_VIT_H_
