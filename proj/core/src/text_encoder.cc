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

#include "pcqa/text_encoder.h"

#include <cmath>
#include <cstring>
#include <random>

#include "pcqa/error.h"
#include "pcqa/file_util.h"

namespace pcqa {

std::string_view PromptPositionName(PromptPosition p) {
  switch (p) {
    case PromptPosition::kBegin: return "begin";
    case PromptPosition::kMiddle: return "middle";
    case PromptPosition::kEnd: return "end";
  }
  return "middle";
}

std::optional<PromptPosition> ParsePromptPosition(std::string_view name) {
  for (PromptPosition p :
       {PromptPosition::kBegin, PromptPosition::kMiddle, PromptPosition::kEnd}) {
    if (PromptPositionName(p) == name) return p;
  }
  return std::nullopt;
}

PromptSet::PromptSet(int context_tokens, int levels, int dim,
                     PromptPosition position, std::uint64_t seed)
    : context_tokens_(context_tokens), levels_(levels), dim_(dim), position_(position) {
  if (context_tokens < 1 || levels < 2 || dim < 1) {
    Fail(ErrorCode::kInvalidArgument, "prompt set needs W >= 1, K >= 2, C >= 1");
  }
  if (position == PromptPosition::kMiddle && context_tokens % 2 != 0) {
    Fail(ErrorCode::kOddContextLength,
         "middle insertion needs an even context length, got " +
             std::to_string(context_tokens));
  }
  std::mt19937_64 rng(seed);
  context_ = Param("prompt.context", RandomNormal(context_tokens, dim, 0.02, rng), true);
  adjectives_ = Param("prompt.adjectives", RandomNormal(levels, dim, 1.0, rng), false);
}

int PromptSet::adjective_slot() const {
  switch (position_) {
    case PromptPosition::kBegin: return 0;
    case PromptPosition::kMiddle: return context_tokens_ / 2;
    case PromptPosition::kEnd: return context_tokens_;
  }
  return 0;
}

std::vector<Var> BuildPrompts(Graph& g, PromptSet& prompts) {
  using namespace ad;
  Var ctx = g.Parameter(prompts.context());
  Var adj = g.Parameter(prompts.adjectives());
  const std::size_t w = static_cast<std::size_t>(prompts.context_tokens());
  const std::size_t slot = static_cast<std::size_t>(prompts.adjective_slot());
  std::vector<Var> out;
  for (int k = 0; k < prompts.levels(); ++k) {
    std::vector<Var> parts;
    if (slot > 0) parts.push_back(SliceRows(ctx, 0, slot));
    parts.push_back(SliceRows(adj, static_cast<std::size_t>(k), 1));
    if (slot < w) parts.push_back(SliceRows(ctx, slot, w - slot));
    out.push_back(ConcatRows(parts));
  }
  return out;
}

std::vector<NdArray> BuildPromptArrays(const PromptSet& prompts) {
  const std::size_t w = static_cast<std::size_t>(prompts.context_tokens());
  const std::size_t c = static_cast<std::size_t>(prompts.dim());
  const std::size_t slot = static_cast<std::size_t>(prompts.adjective_slot());
  const NdArray& ctx = prompts.context().value;
  const NdArray& adj = prompts.adjectives().value;
  std::vector<NdArray> out;
  for (int k = 0; k < prompts.levels(); ++k) {
    NdArray seq = NdArray::Zeros(w + 1, c);
    std::size_t src = 0;
    for (std::size_t row = 0; row <= w; ++row) {
      const double* from = row == slot ? adj.data() + k * c : ctx.data() + (src++) * c;
      std::copy_n(from, c, seq.data() + row * c);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

FrozenTextEncoder::FrozenTextEncoder(const TextEncoderConfig& config,
                                     std::uint64_t seed)
    : config_(config) {
  if (config.dim < 1 || config.heads < 1 || config.dim % config.heads != 0 ||
      config.out_dim < 1 || config.blocks < 1 || config.max_tokens < 1) {
    Fail(ErrorCode::kInvalidArgument, "bad text encoder configuration");
  }
  std::mt19937_64 rng(seed);
  pos_embed_ = Param("text.pos_embed", RandomNormal(config.max_tokens, config.dim, 0.02, rng),
                     false);
  blocks_.reserve(config.blocks);
  const int hidden = static_cast<int>(config.dim * config.mlp_ratio);
  for (int l = 0; l < config.blocks; ++l) {
    blocks_.emplace_back("text.block" + std::to_string(l), config.dim, config.heads,
                         hidden, config.blocks, rng, false);
  }
  projection_ = Param("text.projection",
                      RandomNormal(config.dim, config.out_dim,
                                   1.0 / std::sqrt(static_cast<double>(config.dim)), rng),
                      false);
}

Var FrozenTextEncoder::Forward(Graph& g, Var prompt) {
  using namespace ad;
  const std::size_t t = prompt.rows();
  if (prompt.cols() != static_cast<std::size_t>(config_.dim) ||
      t > static_cast<std::size_t>(config_.max_tokens)) {
    Fail(ErrorCode::kShapeMismatch, "text prompt " + prompt.value().ShapeString());
  }
  Var z = Add(prompt, SliceRows(g.Parameter(pos_embed_), 0, t));
  for (TransformerBlock& block : blocks_) z = block.Forward(g, z);
  return MatMul(MeanOverAxis(z, 0), g.Parameter(projection_));
}

Var FrozenTextEncoder::Encode(Graph& g, PromptSet& prompts) {
  std::vector<Var> feats;
  for (Var p : BuildPrompts(g, prompts)) feats.push_back(Forward(g, p));
  return ad::ConcatRows(feats);
}

std::vector<Param*> FrozenTextEncoder::params() {
  std::vector<Param*> out = {&pos_embed_};
  for (TransformerBlock& b : blocks_) {
    for (Param* p : b.params()) out.push_back(p);
  }
  out.push_back(&projection_);
  return out;
}

std::uint64_t FrozenTextEncoder::WeightsHash() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Param* p : params()) {
    h = Fnv1a64(std::string_view(reinterpret_cast<const char*>(p->value.data()),
                                 p->value.size() * sizeof(double)),
                h);
  }
  return h;
}

}  // namespace pcqa
