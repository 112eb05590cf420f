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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "pcqa/autodiff.h"
#include "pcqa/grad_check.h"
#include "pcqa/ndarray.h"
#include "pcqa/vit.h"
#include "test_support.h"

namespace pcqa {
namespace {

using testing::ExpectErrorCode;

NdArray Random(std::size_t r, std::size_t c, std::mt19937_64& rng, double sd = 1.0) {
  return RandomNormal(r, c, sd, rng);
}

// sum((f(x) + w)^2) with a fixed random offset w so every output entry
// gets a distinct, nonzero upstream gradient.
ScalarLossFn Probe(std::function<Var(Graph&)> forward, std::uint64_t seed) {
  return [forward, seed](bool with_grad) {
    Graph g;
    Var out = forward(g);
    std::mt19937_64 rng(seed);
    Var w = g.Constant(RandomNormal(out.rows(), out.cols(), 1.0, rng));
    Var loss = ad::SumAll(ad::Square(ad::Add(out, w)));
    if (with_grad) {
      g.Backward(loss);
      g.AccumulateParamGrads();
    }
    return loss.scalar();
  };
}

double Check(std::function<Var(Graph&)> forward, std::vector<Param*> params) {
  return GradCheck(Probe(std::move(forward), 77), params).max_relative_error;
}

TEST(NdArrayTest, ShapeAndAccess) {
  NdArray a = NdArray::FromRows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a.at(1, 2), 6.0);
  EXPECT_EQ(a.ShapeString(), "(2x3)");
  const NdArray b = a.Reshaped({3, 2});
  EXPECT_EQ(b.at(2, 1), 6.0);
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] { a.Reshaped({4, 2}); });
  ExpectErrorCode(ErrorCode::kShapeMismatch, [] { NdArray({2, 0}); });
  ExpectErrorCode(ErrorCode::kShapeMismatch, [] { NdArray::FromRows({{1, 2}, {3}}); });
}

TEST(NdArrayTest, StorageIsAligned) {
  for (std::size_t n = 1; n < 40; ++n) {
    NdArray a({n, 3});
    EXPECT_EQ(reinterpret_cast<std::uintptr_t>(a.data()) % 64, 0u);
  }
}

TEST(AutodiffTest, ForwardValues) {
  Graph g;
  Var a = g.Constant(NdArray::FromRows({{1, 2}, {3, 4}}));
  Var b = g.Constant(NdArray::FromRows({{0, 1}, {1, 0}}));
  EXPECT_EQ(ad::MatMul(a, b).value(), NdArray::FromRows({{2, 1}, {4, 3}}));
  EXPECT_EQ(ad::Add(a, b).value(), NdArray::FromRows({{1, 3}, {4, 4}}));
  EXPECT_EQ(ad::Scale(a, 0.5).value(), NdArray::FromRows({{0.5, 1}, {1.5, 2}}));
  EXPECT_EQ(ad::MeanOverAxis(a, 0).value(), NdArray::FromRows({{2, 3}}));
  EXPECT_EQ(ad::MeanOverAxis(a, 1).value(), NdArray::FromRows({{1.5}, {3.5}}));
  EXPECT_EQ(ad::SumAll(a).scalar(), 10.0);
}

TEST(AutodiffTest, SoftmaxOfZerosIsUniform) {
  Graph g;
  Var s = ad::SoftmaxLastDim(g.Constant(NdArray::Zeros(1, 5)));
  for (double v : s.value().values()) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(AutodiffTest, SoftmaxSumsToOneAndIsShiftInvariant) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const NdArray x = Random(3, 7, rng, 5.0);
    NdArray shifted = x;
    for (std::size_t r = 0; r < 3; ++r) {
      const double s = shift(rng);
      for (std::size_t c = 0; c < 7; ++c) shifted.at(r, c) += s;
    }
    Graph g;
    const NdArray p = ad::SoftmaxLastDim(g.Constant(x)).value();
    const NdArray q = ad::SoftmaxLastDim(g.Constant(shifted)).value();
    for (std::size_t r = 0; r < 3; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 7; ++c) {
        sum += p.at(r, c);
        EXPECT_LT(std::abs(p.at(r, c) - q.at(r, c)), 1e-12);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(AutodiffTest, LayerNormNormalizesRows) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const double sd = trial % 2 == 0 ? 20.0 : 0.5;
    const NdArray x = Random(4, 16, rng, sd);
    Graph g;
    Var y = ad::LayerNorm(g.Constant(x), g.Constant(NdArray({1, 16}, 1.0)),
                          g.Constant(NdArray::Zeros(1, 16)));
    for (std::size_t r = 0; r < 4; ++r) {
      double in_mean = 0.0, in_var = 0.0, mean = 0.0, var = 0.0;
      for (std::size_t c = 0; c < 16; ++c) {
        in_mean += x.at(r, c);
        mean += y.value().at(r, c);
      }
      in_mean /= 16.0;
      mean /= 16.0;
      for (std::size_t c = 0; c < 16; ++c) {
        in_var += (x.at(r, c) - in_mean) * (x.at(r, c) - in_mean);
        var += (y.value().at(r, c) - mean) * (y.value().at(r, c) - mean);
      }
      in_var /= 16.0;
      var /= 16.0;
      EXPECT_LT(std::abs(mean), 1e-10);
      EXPECT_NEAR(var, in_var / (in_var + 1e-5), 1e-12);
      if (sd > 1.0) {
        EXPECT_NEAR(var, 1.0, 1e-6);
      }
    }
  }
}

TEST(AutodiffTest, GeluMatchesTanhFormula) {
  Graph g;
  EXPECT_NEAR(ad::Gelu(g.Constant(NdArray::FromRows({{1.0}}))).scalar(), 0.8411919906082768,
              1e-15);
  for (double x : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
    const double expected =
        0.5 * x * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (x + 0.044715 * x * x * x)));
    EXPECT_NEAR(GeluValue(x), expected, 1e-15);
  }
}

TEST(AutodiffTest, CosineOfVectorWithItselfIsOne) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const NdArray v = Random(1, 9, rng);
    Graph g;
    EXPECT_NEAR(ad::CosineSim(g.Constant(v), g.Constant(v)).scalar(), 1.0, 1e-14);
  }
}

TEST(AutodiffTest, ErrorsOnBadShapesAndNonFinite) {
  Graph g;
  Var a = g.Constant(NdArray::Zeros(2, 3));
  Var b = g.Constant(NdArray::Zeros(2, 2));
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] { ad::MatMul(a, a); });
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] { ad::Add(a, b); });
  ExpectErrorCode(ErrorCode::kZeroVector, [&] { ad::CosineSim(a, a); });
  ExpectErrorCode(ErrorCode::kNonFinite,
                  [&] { g.Constant(NdArray::FromRows({{std::nan("")}})); });
  Var big = g.Constant(NdArray::FromRows({{800.0}}));
  ExpectErrorCode(ErrorCode::kNonFinite, [&] { ad::Exp(big); });
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] { g.Backward(a); });
}

TEST(AutodiffTest, MultiSeedBackwardMatchesSeparatePasses) {
  std::mt19937_64 rng(4);
  Param x("x", Random(3, 4, rng));
  const NdArray s1 = Random(3, 4, rng), s2 = Random(1, 4, rng);
  NdArray expected;
  {
    x.ZeroGrad();
    Graph g;
    Var gx = g.Parameter(x);
    Var y1 = ad::Gelu(gx);
    Var y2 = ad::MeanOverAxis(ad::Square(gx), 0);
    const Var outs[] = {y1, y2};
    const NdArray seeds[] = {s1, s2};
    g.Backward(outs, seeds);
    g.AccumulateParamGrads();
    expected = x.grad;
  }
  NdArray sum = NdArray::Zeros(3, 4);
  for (int which = 0; which < 2; ++which) {
    x.ZeroGrad();
    Graph g;
    Var gx = g.Parameter(x);
    Var y = which == 0 ? ad::Gelu(gx) : ad::MeanOverAxis(ad::Square(gx), 0);
    g.Backward(y, which == 0 ? s1 : s2);
    g.AccumulateParamGrads();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x.grad[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(expected[i], sum[i], 1e-14);
}

TEST(GradCheckTest, QuadraticIsExact) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  NdArray start({5, 5});
  for (std::size_t i = 0; i < start.size(); ++i) start[i] = (i % 2 ? -1.0 : 1.0) * mag(rng);
  Param x("x", start);
  auto loss = [&](bool with_grad) {
    Graph g;
    Var l = ad::Scale(ad::SumAll(ad::Square(g.Parameter(x))), 0.5);
    if (with_grad) {
      g.Backward(l);
      g.AccumulateParamGrads();
    }
    return l.scalar();
  };
  Param* params[] = {&x};
  const GradCheckResult r = GradCheck(loss, params);
  EXPECT_LT(r.max_relative_error, 1e-9);
  EXPECT_EQ(r.coords_checked, 25u);
}

TEST(GradCheckTest, SamplesCoordinatesOfLargeParams) {
  std::mt19937_64 rng(6);
  Param x("x", Random(20, 20, rng));
  auto loss = Probe([&](Graph& g) { return ad::Gelu(g.Parameter(x)); }, 1);
  Param* params[] = {&x};
  GradCheckOptions options;
  options.coords_per_param = 64;
  EXPECT_EQ(GradCheck(loss, params, options).coords_checked, 64u);
}

TEST(GradCheckTest, FrozenParamGetsNoGradient) {
  std::mt19937_64 rng(7);
  Param frozen("frozen", Random(3, 3, rng), false);
  Param live("live", Random(3, 3, rng));
  frozen.ZeroGrad();
  live.ZeroGrad();
  Graph g;
  Var l = ad::SumAll(ad::Square(ad::MatMul(g.Parameter(frozen), g.Parameter(live))));
  g.Backward(l);
  g.AccumulateParamGrads();
  for (double v : frozen.grad.values()) EXPECT_EQ(v, 0.0);
  double norm = 0.0;
  for (double v : live.grad.values()) norm += v * v;
  EXPECT_GT(norm, 0.0);
}

TEST(GradCheckTest, NonFiniteLossIsReported) {
  Param x("x", NdArray::FromRows({{1.0}}));
  Param* params[] = {&x};
  ExpectErrorCode(ErrorCode::kNonFinite,
                  [&] { GradCheck([](bool) { return std::nan(""); }, params); });
}

class OpGradientTest : public ::testing::Test {
 protected:
  std::mt19937_64 rng_{8};
};

TEST_F(OpGradientTest, MatMulAddScale) {
  Param a("a", Random(3, 4, rng_)), b("b", Random(4, 2, rng_)), c("c", Random(3, 2, rng_));
  EXPECT_LT(Check([&](Graph& g) {
              return ad::Scale(ad::Add(ad::MatMul(g.Parameter(a), g.Parameter(b)),
                                       g.Parameter(c)),
                               1.7);
            },
                  {&a, &b, &c}),
            1e-6);
}

TEST_F(OpGradientTest, SubAddRowScaleBy) {
  Param a("a", Random(3, 4, rng_)), r("r", Random(1, 4, rng_)), s("s", Random(1, 1, rng_));
  EXPECT_LT(Check([&](Graph& g) {
              return ad::ScaleBy(ad::Sub(ad::AddRow(g.Parameter(a), g.Parameter(r)),
                                         g.Parameter(a)),
                                 g.Parameter(s));
            },
                  {&a, &r, &s}),
            1e-6);
}

TEST_F(OpGradientTest, MeanOverBothAxes) {
  Param a("a", Random(4, 5, rng_));
  EXPECT_LT(Check([&](Graph& g) { return ad::MeanOverAxis(g.Parameter(a), 0); }, {&a}), 1e-6);
  EXPECT_LT(Check([&](Graph& g) { return ad::MeanOverAxis(g.Parameter(a), 1); }, {&a}), 1e-6);
  EXPECT_LT(Check([&](Graph& g) { return ad::MeanAll(g.Parameter(a)); }, {&a}), 1e-6);
}

TEST_F(OpGradientTest, LayerNorm) {
  Param x("x", Random(4, 8, rng_)), gain("gain", Random(1, 8, rng_)),
      bias("bias", Random(1, 8, rng_));
  EXPECT_LT(Check([&](Graph& g) {
              return ad::LayerNorm(g.Parameter(x), g.Parameter(gain), g.Parameter(bias));
            },
                  {&x, &gain, &bias}),
            1e-5);
}

TEST_F(OpGradientTest, SoftmaxGeluExp) {
  Param x("x", Random(3, 6, rng_));
  EXPECT_LT(Check([&](Graph& g) { return ad::SoftmaxLastDim(g.Parameter(x)); }, {&x}), 1e-5);
  EXPECT_LT(Check([&](Graph& g) { return ad::Gelu(g.Parameter(x)); }, {&x}), 1e-5);
  EXPECT_LT(Check([&](Graph& g) { return ad::Exp(g.Parameter(x)); }, {&x}), 1e-5);
}

TEST_F(OpGradientTest, CosineSim) {
  Param a("a", Random(3, 6, rng_)), b("b", Random(5, 6, rng_));
  EXPECT_LT(Check([&](Graph& g) { return ad::CosineSim(g.Parameter(a), g.Parameter(b)); },
                  {&a, &b}),
            1e-5);
}

TEST_F(OpGradientTest, ConcatSliceReshape) {
  Param a("a", Random(2, 4, rng_)), b("b", Random(3, 4, rng_));
  EXPECT_LT(Check([&](Graph& g) {
              const Var parts[] = {g.Parameter(a), g.Parameter(b)};
              return ad::Reshape(ad::SliceRows(ad::ConcatRows(parts), 1, 3), 2, 6);
            },
                  {&a, &b}),
            1e-6);
}

TEST_F(OpGradientTest, MultiHeadAttention) {
  Param qkv("qkv", Random(5, 24, rng_));
  EXPECT_LT(Check([&](Graph& g) { return ad::MultiHeadAttention(g.Parameter(qkv), 2); }, {&qkv}),
            1e-5);
}

}  // namespace
}  // namespace pcqa
