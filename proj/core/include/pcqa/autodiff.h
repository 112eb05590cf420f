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

#ifndef PCQA_AUTODIFF_H_
#define PCQA_AUTODIFF_H_

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pcqa/ndarray.h"

namespace pcqa {

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, int id) : graph_(graph), id_(id) {}

  const NdArray& value() const;
  const NdArray& grad() const;
  bool requires_grad() const;
  Graph* graph() const { return graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const { return value()[0]; }

 private:
  Graph* graph_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so reverse
// creation order is a valid topological order for backpropagation.
//
// Gradients accumulate into per-node buffers. Parameter leaves remember
// their Param; AccumulateParamGrads() adds leaf gradients into Param::grad
// for trainable parameters only. Separate graphs may run concurrently as
// long as AccumulateParamGrads calls are serialized.
class Graph {
 public:
  // Called during backprop with the gradient of this node's output; must
  // add into the gradients of the inputs that require them.
  using BackwardFn = std::function<void(const NdArray& out_grad)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Constant(NdArray value);
  // Leaf that collects a gradient (used to splice graphs together).
  Var Input(NdArray value);
  // Leaf bound to a parameter; memoized per Param. Frozen params produce
  // leaves that do not require gradient.
  Var Parameter(Param& param);

  // Adds a computed node. `inputs` decide whether the node requires grad;
  // `backward` is dropped when none of them does. Throws kNonFinite if the
  // value contains NaN or Inf.
  Var Add(NdArray value, std::span<const Var> inputs, BackwardFn backward);

  // Seeds d(out)/d(out) = 1 for a 1x1 output.
  void Backward(Var out);
  void Backward(Var out, const NdArray& seed);
  // Seeds several outputs at once and backpropagates through all of them.
  void Backward(std::span<const Var> outs, std::span<const NdArray> seeds);

  void AccumulateParamGrads() const;

  // Adds `g` into the gradient buffer of `v` (allocating it on first use).
  void AddGrad(Var v, const NdArray& g);
  NdArray& MutableGrad(Var v);

  const NdArray& value(int id) const;
  const NdArray& grad(int id) const;
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    NdArray value;
    const NdArray* external = nullptr;  // parameter storage
    NdArray grad;
    bool requires_grad = false;
    Param* param = nullptr;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Param*, int> param_nodes_;
};

namespace ad {

// (n x k) * (k x m).
Var MatMul(Var a, Var b);
// Elementwise sum of equal shapes.
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
// Adds a 1 x m row to every row of an n x m matrix.
Var AddRow(Var a, Var row);
Var Scale(Var a, double s);
// Multiplies every entry of `a` by the 1x1 variable `s`.
Var ScaleBy(Var a, Var s);
Var Exp(Var a);
Var Square(Var a);
// axis 0: column means (1 x m); axis 1: row means (n x 1).
Var MeanOverAxis(Var a, int axis);
// Mean of all entries as a 1x1.
Var MeanAll(Var a);
Var SumAll(Var a);
// Row-wise layer normalization followed by gain/bias (1 x m rows).
Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
Var SoftmaxLastDim(Var x);
// tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
Var Gelu(Var x);
// Cosine similarity of every row of a (n x c) with every row of b (m x c):
// an n x m matrix. Throws kZeroVector for a zero row.
Var CosineSim(Var a, Var b);
Var ConcatRows(std::span<const Var> parts);
Var SliceRows(Var a, std::size_t begin, std::size_t count);
Var Reshape(Var a, std::size_t rows, std::size_t cols);
// Multi-head scaled dot-product self-attention. qkv is T x 3C laid out as
// [Q | K | V]; heads split C evenly. Returns T x C (heads concatenated).
Var MultiHeadAttention(Var qkv, std::size_t heads);

}  // namespace ad

double GeluValue(double x);

}  // namespace pcqa

#endif  // PCQA_AUTODIFF_H_
