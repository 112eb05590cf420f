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

#ifndef PCQA_TEXT_ENCODER_H_
#define PCQA_TEXT_ENCODER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcqa/autodiff.h"
#include "pcqa/ndarray.h"
#include "pcqa/vit.h"

namespace pcqa {

enum class PromptPosition { kBegin, kMiddle, kEnd };

std::string_view PromptPositionName(PromptPosition p);
std::optional<PromptPosition> ParsePromptPosition(std::string_view name);

// BT.500 five-grade quality adjectives, best first.
inline const std::vector<std::string> kDefaultQualityAdjectives = {
    "excellent", "good", "fair", "poor", "bad"};

// Learnable context tokens [V]_1..[V]_W around one fixed adjective
// embedding per quality level.
class PromptSet {
 public:
  // Context tokens ~ N(0, 0.02); adjective embeddings ~ N(0, 1), both from
  // `seed`. Throws kOddContextLength for odd W in middle mode.
  PromptSet(int context_tokens, int levels, int dim, PromptPosition position,
            std::uint64_t seed);

  int context_tokens() const { return context_tokens_; }
  int levels() const { return levels_; }
  int dim() const { return dim_; }
  PromptPosition position() const { return position_; }
  // Row index of the adjective within each assembled prompt.
  int adjective_slot() const;

  Param& context() { return context_; }
  Param& adjectives() { return adjectives_; }
  const Param& context() const { return context_; }
  const Param& adjectives() const { return adjectives_; }

 private:
  int context_tokens_;
  int levels_;
  int dim_;
  PromptPosition position_;
  Param context_;     // W x C_t, trainable
  Param adjectives_;  // K x C_t, frozen
};

// K prompts of (W+1) x C_t, differing only at adjective_slot().
std::vector<Var> BuildPrompts(Graph& g, PromptSet& prompts);
std::vector<NdArray> BuildPromptArrays(const PromptSet& prompts);

struct TextEncoderConfig {
  int dim = 32;       // C_t
  int out_dim = 32;   // C
  int blocks = 2;
  int heads = 4;
  double mlp_ratio = 4.0;
  int max_tokens = 77;
};

// Seed-initialized transformer whose weights are never trained:
// tokens + positional table -> blocks -> mean over tokens -> linear
// projection to out_dim.
class FrozenTextEncoder {
 public:
  FrozenTextEncoder(const TextEncoderConfig& config, std::uint64_t seed);

  FrozenTextEncoder(const FrozenTextEncoder&) = delete;
  FrozenTextEncoder& operator=(const FrozenTextEncoder&) = delete;

  // prompt: T x C_t with T <= max_tokens. Returns 1 x out_dim.
  Var Forward(Graph& g, Var prompt);

  // Stacks Forward over all prompts into K x out_dim.
  Var Encode(Graph& g, PromptSet& prompts);

  std::vector<Param*> params();
  // FNV-1a over every weight's bytes.
  std::uint64_t WeightsHash();
  const TextEncoderConfig& config() const { return config_; }

 private:
  TextEncoderConfig config_;
  Param pos_embed_;
  std::vector<TransformerBlock> blocks_;
  Param projection_;
};

}  // namespace pcqa

#endif  // PCQA_TEXT_ENCODER_H_
