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

#include "pcqa/autodiff.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pcqa/error.h"

namespace pcqa {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

namespace {

MatMap AsMat(NdArray& a) {
  return MatMap(a.data(), static_cast<Eigen::Index>(a.rows()),
                static_cast<Eigen::Index>(a.cols()));
}

ConstMatMap AsMat(const NdArray& a) {
  return ConstMatMap(a.data(), static_cast<Eigen::Index>(a.rows()),
                     static_cast<Eigen::Index>(a.cols()));
}

void RequireSameShape(const NdArray& a, const NdArray& b, const char* op) {
  if (!a.SameShape(b)) {
    Fail(ErrorCode::kShapeMismatch,
         std::string(op) + ": " + a.ShapeString() + " vs " + b.ShapeString());
  }
}

}  // namespace

const NdArray& Var::value() const { return graph_->value(id_); }
const NdArray& Var::grad() const { return graph_->grad(id_); }
bool Var::requires_grad() const { return graph_->requires_grad(id_); }

Var Graph::Constant(NdArray value) {
  if (!value.AllFinite()) Fail(ErrorCode::kNonFinite, "non-finite constant");
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Graph::Input(NdArray value) {
  Var v = Constant(std::move(value));
  nodes_[v.id()].requires_grad = true;
  return v;
}

Var Graph::Parameter(Param& param) {
  if (auto it = param_nodes_.find(&param); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  if (!param.value.AllFinite()) {
    Fail(ErrorCode::kNonFinite, "non-finite parameter " + param.name);
  }
  Node n;
  n.external = &param.value;
  n.param = &param;
  n.requires_grad = param.trainable;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size() - 1);
  param_nodes_.emplace(&param, id);
  return Var(this, id);
}

Var Graph::Add(NdArray value, std::span<const Var> inputs, BackwardFn backward) {
  if (!value.AllFinite()) Fail(ErrorCode::kNonFinite, "operation produced NaN/Inf");
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.graph() != this) Fail(ErrorCode::kInvalidArgument, "mixing graphs");
    n.requires_grad = n.requires_grad || requires_grad(in.id());
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

const NdArray& Graph::value(int id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

const NdArray& Graph::grad(int id) const {
  const Node& n = nodes_[id];
  if (n.grad.size() == 0) {
    // Never reached by backprop: report zeros of the right shape.
    static thread_local NdArray zeros;
    zeros = NdArray(value(id).shape(), 0.0);
    return zeros;
  }
  return n.grad;
}

NdArray& Graph::MutableGrad(Var v) {
  Node& n = nodes_[v.id()];
  if (n.grad.size() == 0) n.grad = NdArray(value(v.id()).shape(), 0.0);
  return n.grad;
}

void Graph::AddGrad(Var v, const NdArray& g) {
  if (!requires_grad(v.id())) return;
  NdArray& dst = MutableGrad(v);
  if (dst.size() != g.size()) {
    Fail(ErrorCode::kShapeMismatch, "gradient shape " + g.ShapeString() +
                                        " for value " + dst.ShapeString());
  }
  double* d = dst.data();
  const double* s = g.data();
  for (std::size_t i = 0; i < g.size(); ++i) d[i] += s[i];
}

void Graph::Backward(Var out) {
  if (out.value().size() != 1) {
    Fail(ErrorCode::kShapeMismatch, "Backward(out) needs a 1x1 output");
  }
  Backward(out, NdArray({1, 1}, 1.0));
}

void Graph::Backward(Var out, const NdArray& seed) {
  if (!requires_grad(out.id())) return;
  AddGrad(out, seed);
  for (int id = out.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(n.grad);
  }
}

void Graph::Backward(std::span<const Var> outs, std::span<const NdArray> seeds) {
  if (outs.size() != seeds.size()) Fail(ErrorCode::kLengthMismatch, "outputs vs seeds");
  int top = -1;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (!requires_grad(outs[i].id())) continue;
    AddGrad(outs[i], seeds[i]);
    top = std::max(top, outs[i].id());
  }
  for (int id = top; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(n.grad);
  }
}

void Graph::AccumulateParamGrads() const {
  for (const Node& n : nodes_) {
    if (!n.param || !n.param->trainable || n.grad.size() == 0) continue;
    double* d = n.param->grad.data();
    const double* s = n.grad.data();
    for (std::size_t i = 0; i < n.grad.size(); ++i) d[i] += s[i];
  }
}

double GeluValue(double x) {
  constexpr double k = 0.7978845608028654;  // sqrt(2 / pi)
  return 0.5 * x * (1.0 + std::tanh(k * (x + 0.044715 * x * x * x)));
}

namespace ad {

Var MatMul(Var a, Var b) {
  const NdArray& av = a.value();
  const NdArray& bv = b.value();
  if (av.cols() != bv.rows()) {
    Fail(ErrorCode::kShapeMismatch,
         "MatMul: " + av.ShapeString() + " x " + bv.ShapeString());
  }
  NdArray out = NdArray::Zeros(av.rows(), bv.cols());
  AsMat(out).noalias() = AsMat(av) * AsMat(bv);
  Graph* g = a.graph();
  const Var inputs[] = {a, b};
  return g->Add(std::move(out), inputs, [g, a, b](const NdArray& dy) {
    if (a.requires_grad()) {
      AsMat(g->MutableGrad(a)).noalias() += AsMat(dy) * AsMat(b.value()).transpose();
    }
    if (b.requires_grad()) {
      AsMat(g->MutableGrad(b)).noalias() += AsMat(a.value()).transpose() * AsMat(dy);
    }
  });
}

Var Add(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "Add");
  NdArray out = a.value();
  AsMat(out) += AsMat(b.value());
  Graph* g = a.graph();
  const Var inputs[] = {a, b};
  return g->Add(std::move(out), inputs, [g, a, b](const NdArray& dy) {
    g->AddGrad(a, dy);
    g->AddGrad(b, dy);
  });
}

Var Sub(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "Sub");
  NdArray out = a.value();
  AsMat(out) -= AsMat(b.value());
  Graph* g = a.graph();
  const Var inputs[] = {a, b};
  return g->Add(std::move(out), inputs, [g, a, b](const NdArray& dy) {
    g->AddGrad(a, dy);
    if (b.requires_grad()) AsMat(g->MutableGrad(b)) -= AsMat(dy);
  });
}

Var AddRow(Var a, Var row) {
  const NdArray& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != a.cols()) {
    Fail(ErrorCode::kShapeMismatch, "AddRow: " + a.value().ShapeString() + " + " +
                                        rv.ShapeString());
  }
  NdArray out = a.value();
  AsMat(out).rowwise() += AsMat(rv).row(0);
  Graph* g = a.graph();
  const Var inputs[] = {a, row};
  return g->Add(std::move(out), inputs, [g, a, row](const NdArray& dy) {
    g->AddGrad(a, dy);
    if (row.requires_grad()) {
      AsMat(g->MutableGrad(row)).row(0) += AsMat(dy).colwise().sum();
    }
  });
}

Var Scale(Var a, double s) {
  NdArray out = a.value();
  AsMat(out) *= s;
  Graph* g = a.graph();
  const Var inputs[] = {a};
  return g->Add(std::move(out), inputs, [g, a, s](const NdArray& dy) {
    AsMat(g->MutableGrad(a)) += s * AsMat(dy);
  });
}

Var ScaleBy(Var a, Var s) {
  if (s.value().size() != 1) Fail(ErrorCode::kShapeMismatch, "ScaleBy needs 1x1");
  NdArray out = a.value();
  AsMat(out) *= s.scalar();
  Graph* g = a.graph();
  const Var inputs[] = {a, s};
  return g->Add(std::move(out), inputs, [g, a, s](const NdArray& dy) {
    if (a.requires_grad()) AsMat(g->MutableGrad(a)) += s.scalar() * AsMat(dy);
    if (s.requires_grad()) {
      g->MutableGrad(s)[0] += AsMat(dy).cwiseProduct(AsMat(a.value())).sum();
    }
  });
}

Var Exp(Var a) {
  NdArray out = a.value();
  for (double& v : out.values()) v = std::exp(v);
  Graph* g = a.graph();
  const Var inputs[] = {a};
  Var result;
  result = g->Add(std::move(out), inputs, [g, a, id = static_cast<int>(g->node_count())](
                                              const NdArray& dy) {
    const NdArray& y = g->value(id);
    NdArray& da = g->MutableGrad(a);
    for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * y[i];
  });
  return result;
}

Var Square(Var a) {
  NdArray out = a.value();
  for (double& v : out.values()) v = v * v;
  Graph* g = a.graph();
  const Var inputs[] = {a};
  return g->Add(std::move(out), inputs, [g, a](const NdArray& dy) {
    const NdArray& x = a.value();
    NdArray& da = g->MutableGrad(a);
    for (std::size_t i = 0; i < dy.size(); ++i) da[i] += 2.0 * x[i] * dy[i];
  });
}

Var MeanOverAxis(Var a, int axis) {
  const NdArray& av = a.value();
  const std::size_t r = av.rows(), c = av.cols();
  Graph* g = a.graph();
  const Var inputs[] = {a};
  if (axis == 0) {
    NdArray out = NdArray::Zeros(1, c);
    AsMat(out).row(0) = AsMat(av).colwise().mean();
    return g->Add(std::move(out), inputs, [g, a, r](const NdArray& dy) {
      AsMat(g->MutableGrad(a)).rowwise() += AsMat(dy).row(0) / static_cast<double>(r);
    });
  }
  if (axis != 1) Fail(ErrorCode::kInvalidArgument, "MeanOverAxis axis must be 0 or 1");
  NdArray out = NdArray::Zeros(r, 1);
  AsMat(out).col(0) = AsMat(av).rowwise().mean();
  return g->Add(std::move(out), inputs, [g, a, c](const NdArray& dy) {
    AsMat(g->MutableGrad(a)).colwise() += AsMat(dy).col(0) / static_cast<double>(c);
  });
}

Var MeanAll(Var a) {
  const double n = static_cast<double>(a.value().size());
  return Scale(SumAll(a), 1.0 / n);
}

Var SumAll(Var a) {
  NdArray out({1, 1}, AsMat(a.value()).sum());
  Graph* g = a.graph();
  const Var inputs[] = {a};
  return g->Add(std::move(out), inputs, [g, a](const NdArray& dy) {
    AsMat(g->MutableGrad(a)).array() += dy[0];
  });
}

Var LayerNorm(Var x, Var gain, Var bias, double eps) {
  const NdArray& xv = x.value();
  const std::size_t r = xv.rows(), c = xv.cols();
  if (gain.value().size() != c || bias.value().size() != c) {
    Fail(ErrorCode::kShapeMismatch, "LayerNorm gain/bias width");
  }
  NdArray xhat = NdArray::Zeros(r, c);
  NdArray inv_std = NdArray::Zeros(r, 1);
  auto X = AsMat(xv);
  auto Xh = AsMat(xhat);
  for (std::size_t i = 0; i < r; ++i) {
    const double mean = X.row(i).mean();
    const double var = (X.row(i).array() - mean).square().mean();
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    Xh.row(i) = (X.row(i).array() - mean) * inv_std[i];
  }
  NdArray out = NdArray::Zeros(r, c);
  AsMat(out) = (Xh.array().rowwise() * AsMat(gain.value()).row(0).array()).rowwise() +
               AsMat(bias.value()).row(0).array();
  Graph* g = x.graph();
  const Var inputs[] = {x, gain, bias};
  return g->Add(std::move(out), inputs,
                [g, x, gain, bias, xhat = std::move(xhat),
                 inv_std = std::move(inv_std), c](const NdArray& dy) {
                  auto Dy = AsMat(dy);
                  auto Xh = AsMat(xhat);
                  if (gain.requires_grad()) {
                    AsMat(g->MutableGrad(gain)).row(0) +=
                        Dy.cwiseProduct(Xh).colwise().sum();
                  }
                  if (bias.requires_grad()) {
                    AsMat(g->MutableGrad(bias)).row(0) += Dy.colwise().sum();
                  }
                  if (!x.requires_grad()) return;
                  auto Dx = AsMat(g->MutableGrad(x));
                  const auto gamma = AsMat(gain.value()).row(0).array();
                  for (Eigen::Index i = 0; i < Dy.rows(); ++i) {
                    const Eigen::ArrayXd dxh = (Dy.row(i).array() * gamma).transpose();
                    const Eigen::ArrayXd xh = Xh.row(i).array().transpose();
                    const double m1 = dxh.mean();
                    const double m2 = (dxh * xh).mean();
                    Dx.row(i).array() +=
                        (inv_std[i] * (dxh - m1 - xh * m2)).transpose();
                  }
                  (void)c;
                });
}

Var SoftmaxLastDim(Var x) {
  NdArray out = x.value();
  auto Y = AsMat(out);
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    const double mx = Y.row(i).maxCoeff();
    Y.row(i) = (Y.row(i).array() - mx).exp();
    Y.row(i) /= Y.row(i).sum();
  }
  Graph* g = x.graph();
  const Var inputs[] = {x};
  const int id = static_cast<int>(g->node_count());
  return g->Add(std::move(out), inputs, [g, x, id](const NdArray& dy) {
    auto Yv = AsMat(g->value(id));
    auto Dy = AsMat(dy);
    auto Dx = AsMat(g->MutableGrad(x));
    for (Eigen::Index i = 0; i < Yv.rows(); ++i) {
      const double dot = Dy.row(i).dot(Yv.row(i));
      Dx.row(i).array() += Yv.row(i).array() * (Dy.row(i).array() - dot);
    }
  });
}

Var Gelu(Var x) {
  NdArray out = x.value();
  for (double& v : out.values()) v = GeluValue(v);
  Graph* g = x.graph();
  const Var inputs[] = {x};
  return g->Add(std::move(out), inputs, [g, x](const NdArray& dy) {
    constexpr double k = 0.7978845608028654;
    const NdArray& xv = x.value();
    NdArray& dx = g->MutableGrad(x);
    for (std::size_t i = 0; i < xv.size(); ++i) {
      const double v = xv[i];
      const double t = std::tanh(k * (v + 0.044715 * v * v * v));
      const double d = 0.5 * (1.0 + t) +
                       0.5 * v * (1.0 - t * t) * k * (1.0 + 3.0 * 0.044715 * v * v);
      dx[i] += dy[i] * d;
    }
  });
}

Var CosineSim(Var a, Var b) {
  const NdArray& av = a.value();
  const NdArray& bv = b.value();
  if (av.cols() != bv.cols()) {
    Fail(ErrorCode::kShapeMismatch,
         "CosineSim: " + av.ShapeString() + " vs " + bv.ShapeString());
  }
  auto A = AsMat(av);
  auto B = AsMat(bv);
  Eigen::VectorXd na = A.rowwise().norm();
  Eigen::VectorXd nb = B.rowwise().norm();
  if ((na.array() == 0.0).any() || (nb.array() == 0.0).any()) {
    Fail(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  NdArray out = NdArray::Zeros(av.rows(), bv.rows());
  AsMat(out) = (A * B.transpose()).array().colwise() / na.array();
  AsMat(out).array().rowwise() /= nb.transpose().array();
  Graph* g = a.graph();
  const Var inputs[] = {a, b};
  const int id = static_cast<int>(g->node_count());
  return g->Add(std::move(out), inputs,
                [g, a, b, id, na = std::move(na), nb = std::move(nb)](const NdArray& dy) {
                  auto C = AsMat(g->value(id));
                  auto Dy = AsMat(dy);
                  auto A = AsMat(a.value());
                  auto B = AsMat(b.value());
                  // d c_ij / d a_i = b_j / (|a_i||b_j|) - c_ij a_i / |a_i|^2
                  const RowMat w = Dy.array().colwise() / na.array();
                  const RowMat wb = w.array().rowwise() / nb.transpose().array();
                  const Eigen::VectorXd s = Dy.cwiseProduct(C).rowwise().sum();
                  if (a.requires_grad()) {
                    auto Da = AsMat(g->MutableGrad(a));
                    Da.noalias() += wb * B;
                    Da.array() -= A.array().colwise() *
                                  (s.array() / na.array().square());
                  }
                  if (b.requires_grad()) {
                    auto Db = AsMat(g->MutableGrad(b));
                    const Eigen::VectorXd t = Dy.cwiseProduct(C).colwise().sum().transpose();
                    Db.noalias() += wb.transpose() * A;
                    Db.array() -= B.array().colwise() *
                                  (t.array() / nb.array().square());
                  }
                });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) Fail(ErrorCode::kInvalidArgument, "ConcatRows of nothing");
  const std::size_t c = parts.front().cols();
  std::size_t r = 0;
  for (const Var& p : parts) {
    if (p.cols() != c) Fail(ErrorCode::kShapeMismatch, "ConcatRows width");
    r += p.rows();
  }
  NdArray out = NdArray::Zeros(r, c);
  std::size_t off = 0;
  for (const Var& p : parts) {
    std::copy(p.value().values().begin(), p.value().values().end(), out.data() + off);
    off += p.value().size();
  }
  Graph* g = parts.front().graph();
  std::vector<Var> owned(parts.begin(), parts.end());
  return g->Add(std::move(out), parts, [g, owned](const NdArray& dy) {
    std::size_t off = 0;
    for (const Var& p : owned) {
      const std::size_t n = p.value().size();
      if (p.requires_grad()) {
        NdArray& dp = g->MutableGrad(p);
        for (std::size_t i = 0; i < n; ++i) dp[i] += dy[off + i];
      }
      off += n;
    }
  });
}

Var SliceRows(Var a, std::size_t begin, std::size_t count) {
  const NdArray& av = a.value();
  if (count == 0 || begin + count > av.rows()) {
    Fail(ErrorCode::kShapeMismatch, "SliceRows out of range");
  }
  const std::size_t c = av.cols();
  NdArray out = NdArray::Zeros(count, c);
  std::copy_n(av.data() + begin * c, count * c, out.data());
  Graph* g = a.graph();
  const Var inputs[] = {a};
  return g->Add(std::move(out), inputs, [g, a, begin, c](const NdArray& dy) {
    NdArray& da = g->MutableGrad(a);
    for (std::size_t i = 0; i < dy.size(); ++i) da[begin * c + i] += dy[i];
  });
}

Var Reshape(Var a, std::size_t rows, std::size_t cols) {
  if (rows * cols != a.value().size()) {
    Fail(ErrorCode::kShapeMismatch, "Reshape element count");
  }
  NdArray out = a.value().Reshaped({rows, cols});
  Graph* g = a.graph();
  const Var inputs[] = {a};
  return g->Add(std::move(out), inputs, [g, a](const NdArray& dy) {
    NdArray& da = g->MutableGrad(a);
    for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i];
  });
}

Var MultiHeadAttention(Var qkv, std::size_t heads) {
  const NdArray& in = qkv.value();
  if (in.cols() % 3 != 0 || heads == 0 || (in.cols() / 3) % heads != 0) {
    Fail(ErrorCode::kShapeMismatch, "MultiHeadAttention layout " + in.ShapeString());
  }
  const Eigen::Index t = static_cast<Eigen::Index>(in.rows());
  const Eigen::Index c = static_cast<Eigen::Index>(in.cols() / 3);
  const Eigen::Index d = c / static_cast<Eigen::Index>(heads);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  auto X = AsMat(in);

  NdArray out = NdArray::Zeros(in.rows(), static_cast<std::size_t>(c));
  auto O = AsMat(out);
  // Attention weights per head, kept for the backward pass.
  std::vector<RowMat> probs(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Eigen::Index off = static_cast<Eigen::Index>(h) * d;
    auto Q = X.middleCols(off, d);
    auto K = X.middleCols(c + off, d);
    auto V = X.middleCols(2 * c + off, d);
    RowMat s = (Q * K.transpose()) * inv_sqrt_d;
    for (Eigen::Index i = 0; i < t; ++i) {
      const double mx = s.row(i).maxCoeff();
      s.row(i) = (s.row(i).array() - mx).exp();
      s.row(i) /= s.row(i).sum();
    }
    O.middleCols(off, d).noalias() = s * V;
    probs[h] = std::move(s);
  }
  Graph* g = qkv.graph();
  const Var inputs[] = {qkv};
  return g->Add(std::move(out), inputs,
                [g, qkv, probs = std::move(probs), c, d, inv_sqrt_d](const NdArray& dy) {
                  auto X = AsMat(qkv.value());
                  auto Dy = AsMat(dy);
                  auto Dx = AsMat(g->MutableGrad(qkv));
                  for (std::size_t h = 0; h < probs.size(); ++h) {
                    const Eigen::Index off = static_cast<Eigen::Index>(h) * d;
                    const RowMat& P = probs[h];
                    auto Q = X.middleCols(off, d);
                    auto K = X.middleCols(c + off, d);
                    auto V = X.middleCols(2 * c + off, d);
                    auto dO = Dy.middleCols(off, d);
                    Dx.middleCols(2 * c + off, d).noalias() += P.transpose() * dO;
                    RowMat dP = dO * V.transpose();
                    const Eigen::VectorXd rs = dP.cwiseProduct(P).rowwise().sum();
                    RowMat dS = P.array() * (dP.array().colwise() - rs.array());
                    dS *= inv_sqrt_d;
                    Dx.middleCols(off, d).noalias() += dS * K;
                    Dx.middleCols(c + off, d).noalias() += dS.transpose() * Q;
                  }
                });
}

}  // namespace ad
}  // namespace pcqa
