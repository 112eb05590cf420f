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

#include <algorithm>
#include <cmath>
#include <set>

#include "pcqa/checkpoint.h"
#include "pcqa/corpus.h"
#include "pcqa/kfold.h"
#include "pcqa/model.h"
#include "pcqa/optimizer.h"
#include "pcqa/trainer.h"
#include "test_support.h"

namespace pcqa {
namespace {

using testing::ExpectErrorCode;
using testing::TempDir;

std::vector<int> GroupedIds(int references, int per_reference) {
  std::vector<int> ids;
  for (int r = 0; r < references; ++r) {
    for (int i = 0; i < per_reference; ++i) ids.push_back(r);
  }
  return ids;
}

TEST(KFoldTest, NineReferencesNineFolds) {
  const auto ids = GroupedIds(9, 3);
  const auto folds = KFoldSplit(ids, 9, 1);
  ASSERT_EQ(folds.size(), 9u);
  for (const FoldSplit& f : folds) {
    EXPECT_EQ(f.test_references.size(), 1u);
    EXPECT_EQ(f.test.size(), 3u);
    EXPECT_EQ(f.train.size(), 24u);
  }
}

TEST(KFoldTest, EightReferencesFiveFolds) {
  const auto ids = GroupedIds(8, 24);
  const auto folds = KFoldSplit(ids, 5, 7);
  std::multiset<std::size_t> sizes;
  for (const FoldSplit& f : folds) sizes.insert(f.test_references.size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{1, 1, 2, 2, 2}));
}

TEST(KFoldTest, PartitionWithoutLeakage) {
  std::vector<int> ids = GroupedIds(11, 4);
  std::rotate(ids.begin(), ids.begin() + 5, ids.end());
  const auto folds = KFoldSplit(ids, 4, 3);
  std::vector<int> tested(ids.size(), 0);
  for (const FoldSplit& f : folds) {
    std::set<int> test_refs, train_refs;
    for (std::size_t i : f.test) {
      ++tested[i];
      test_refs.insert(ids[i]);
    }
    for (std::size_t i : f.train) train_refs.insert(ids[i]);
    EXPECT_EQ(f.test.size() + f.train.size(), ids.size());
    for (int r : test_refs) EXPECT_EQ(train_refs.count(r), 0u) << "reference " << r;
    EXPECT_EQ(std::set<int>(f.test_references.begin(), f.test_references.end()), test_refs);
  }
  for (int t : tested) EXPECT_EQ(t, 1);
  EXPECT_EQ(KFoldSplit(ids, 4, 3)[2].test, folds[2].test);
}

TEST(KFoldTest, Errors) {
  const auto ids = GroupedIds(3, 2);
  ExpectErrorCode(ErrorCode::kTooFewReferences, [&] { KFoldSplit(ids, 4, 1); });
  ExpectErrorCode(ErrorCode::kInvalidArgument, [&] { KFoldSplit(ids, 1, 1); });
}

TEST(AdamTest, ZeroGradientOnlyDecays) {
  AdamOptions o;
  o.lr = 0.1;
  o.weight_decay = 0.0;
  AdamW adam(o);
  Param p("p", NdArray({2, 2}, 1.5));
  Param* params[] = {&p};
  for (int i = 0; i < 5; ++i) adam.Step(params);
  for (double v : p.value.values()) EXPECT_EQ(v, 1.5);
  o.weight_decay = 0.1;
  AdamW decaying(o);
  decaying.Step(params);
  for (double v : p.value.values()) EXPECT_NEAR(v, 1.5 * (1.0 - 0.1 * 0.1), 1e-15);
}

TEST(AdamTest, ScalarRecurrence) {
  AdamOptions o;
  o.lr = 0.01;
  o.weight_decay = 0.0;
  AdamW adam(o);
  Param p("p", NdArray({1, 1}, 0.0));
  Param* params[] = {&p};
  double x = 0.0, m = 0.0, v = 0.0;
  const double grads[] = {1.0, -0.5, 2.0, 0.25, 3.0};
  for (int t = 1; t <= 5; ++t) {
    const double g = grads[t - 1];
    p.grad[0] = g;
    adam.Step(params);
    m = o.beta1 * m + (1 - o.beta1) * g;
    v = o.beta2 * v + (1 - o.beta2) * g * g;
    const double mh = m / (1 - std::pow(o.beta1, t));
    const double vh = v / (1 - std::pow(o.beta2, t));
    x -= o.lr * mh / (std::sqrt(vh) + o.eps);
    EXPECT_NEAR(p.value[0], x, 1e-15);
  }
}

TEST(AdamTest, FrozenParamsAndZeroLearningRate) {
  AdamOptions o;
  o.lr = 0.05;
  AdamW adam(o);
  Param frozen("f", NdArray({3, 1}, 2.0), false);
  Param live("l", NdArray({3, 1}, 2.0));
  Param* params[] = {&frozen, &live};
  for (int i = 0; i < 100; ++i) {
    frozen.grad.Fill(1.0);
    live.grad.Fill(1.0);
    adam.Step(params);
  }
  for (double v : frozen.value.values()) EXPECT_EQ(v, 2.0);
  EXPECT_LT(live.value[0], 2.0);
  o.lr = 0.0;
  AdamW still(o);
  const NdArray before = live.value;
  still.Step(params);
  EXPECT_EQ(live.value, before);
  Param bad("b", NdArray({2, 2}, 0.0));
  bad.grad = NdArray({1, 4});
  Param* bad_params[] = {&bad};
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] { still.Step(bad_params); });
}

TEST(CheckpointTest, RoundTripIsByteExact) {
  Checkpoint c;
  c.config_hash = 0x1234abcd5678ef00ULL;
  c.Put("a/w", NdArray::FromRows({{1.0, -2.5}, {3.25, 1e-300}}));
  c.Put("frozen", NdArray({4}, 0.1), true);
  const std::string bytes = EncodeCheckpoint(c);
  const Checkpoint back = DecodeCheckpoint(bytes, c.config_hash);
  EXPECT_EQ(back, c);
  EXPECT_EQ(EncodeCheckpoint(back), bytes);
  EXPECT_TRUE(back.Find("frozen")->frozen);
  EXPECT_EQ(back.Find("missing"), nullptr);
  ExpectErrorCode(ErrorCode::kInvalidArgument, [&] { back.Get("missing"); });

  TempDir dir("ckpt");
  SaveCheckpoint(dir / "c.bin", c);
  EXPECT_EQ(LoadCheckpoint(dir / "c.bin"), c);
}

TEST(CheckpointTest, Errors) {
  Checkpoint c;
  c.config_hash = 7;
  c.Put("x", NdArray({2}, 1.0));
  std::string bytes = EncodeCheckpoint(c);
  ExpectErrorCode(ErrorCode::kHashMismatch, [&] { DecodeCheckpoint(bytes, 8); });
  ExpectErrorCode(ErrorCode::kIo, [&] { DecodeCheckpoint(bytes.substr(0, bytes.size() - 3)); });
  bytes[0] = 'X';
  ExpectErrorCode(ErrorCode::kBadMagic, [&] { DecodeCheckpoint(bytes); });
}

ModelConfig TinyModel() {
  ModelConfig c;
  c.crop = 16;
  c.patch = 4;
  c.dim = 8;
  c.blocks = 1;
  c.heads = 2;
  c.mlp_ratio = 2.0;
  c.views = 6;
  c.context_tokens = 4;
  c.text_blocks = 1;
  c.text_heads = 2;
  return c;
}

class TrainerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    CorpusOptions o;
    o.references = 2;
    o.points_per_reference = 600;
    o.seed = 5;
    corpus_ = new std::vector<CorpusSample>(GenerateCorpus(o));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    corpus_ = nullptr;
  }

  static TrainOptions Options() {
    TrainOptions t;
    t.batch = 4;
    t.epochs = 2;
    t.adam.lr = 1e-3;
    t.seed = 9;
    t.render.size = 32;
    return t;
  }

  static std::vector<std::size_t> TrainIndices() {
    return {0, 3, 5, 8, 13, 21, 26, 30, 34, 40};
  }

  static std::vector<CorpusSample>* corpus_;
};

std::vector<CorpusSample>* TrainerTest::corpus_ = nullptr;

std::vector<NdArray> Values(QualityModel& m) {
  std::vector<NdArray> out;
  for (Param* p : m.params()) out.push_back(p->value);
  return out;
}

TEST_F(TrainerTest, DeterministicAcrossRunsAndThreadCounts) {
  QualityModel a(TinyModel(), 3), b(TinyModel(), 3);
  TrainOptions one = Options(), two = Options();
  two.threads = 2;
  Trainer ta(a, one, *corpus_, TrainIndices(), 42);
  Trainer tb(b, two, *corpus_, TrainIndices(), 42);
  ta.Run();
  tb.Run();
  EXPECT_EQ(Values(a), Values(b));
  EXPECT_EQ(ta.epoch_losses(), tb.epoch_losses());
  ASSERT_EQ(ta.trace().size(), 6u);
  for (double l : ta.epoch_losses()) EXPECT_TRUE(std::isfinite(l));
  EXPECT_EQ(TraceCsv(ta.trace()), TraceCsv(tb.trace()));
}

TEST_F(TrainerTest, ResumeMatchesUninterruptedRun) {
  QualityModel full(TinyModel(), 4);
  Trainer tf(full, Options(), *corpus_, TrainIndices(), 42);
  tf.Run();

  QualityModel first(TinyModel(), 4);
  Trainer t1(first, Options(), *corpus_, TrainIndices(), 42);
  t1.RunEpoch();
  const std::string bytes = EncodeCheckpoint(t1.Save());

  QualityModel resumed(TinyModel(), 77);
  Trainer t2(resumed, Options(), *corpus_, TrainIndices(), 42);
  t2.Restore(DecodeCheckpoint(bytes, 42));
  EXPECT_EQ(t2.epochs_done(), 1);
  t2.Run();
  EXPECT_EQ(Values(resumed), Values(full));
  EXPECT_EQ(t2.epoch_losses(), tf.epoch_losses());
  EXPECT_EQ(t2.best_epoch(), tf.best_epoch());

  Trainer other(resumed, Options(), *corpus_, TrainIndices(), 43);
  ExpectErrorCode(ErrorCode::kHashMismatch, [&] { other.Restore(DecodeCheckpoint(bytes)); });
}

TEST_F(TrainerTest, StagedGradientsMatchSingleGraph) {
  const std::vector<std::size_t> batch = {3, 21, 40};
  const ModelConfig config = TinyModel();
  const TrainOptions options = Options();

  QualityModel reference(config, 6);
  for (Param* p : reference.params()) p->ZeroGrad();
  Graph g;
  std::vector<SampleTokens> tokens;
  std::vector<const OpinionScoreDistribution*> labels;
  for (std::size_t i : batch) {
    const SampleInput in = TrainingInput((*corpus_)[i], config, options.render, options.seed, 1);
    tokens.push_back(reference.EncodeSample(g, in));
    labels.push_back(&(*corpus_)[i].osd_label);
  }
  const HeadResult r = reference.Head(g, tokens, labels);
  g.Backward(r.loss);
  g.AccumulateParamGrads();

  QualityModel staged(config, 6);
  Trainer trainer(staged, options, *corpus_, TrainIndices(), 1);
  const LossBreakdown parts = trainer.Step(batch, 1);
  EXPECT_NEAR(parts.total, r.loss.scalar(), 1e-12);
  const auto ref_params = reference.params();
  const auto staged_params = staged.params();
  for (std::size_t k = 0; k < ref_params.size(); ++k) {
    const NdArray& a = ref_params[k]->grad;
    const NdArray& b = staged_params[k]->grad;
    ASSERT_TRUE(a.SameShape(b));
    double scale = 0.0;
    for (double v : a.values()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12 * std::max(1.0, scale)) << ref_params[k]->name;
    }
  }
}

TEST_F(TrainerTest, FrozenTextParametersStayBitIdentical) {
  QualityModel model(TinyModel(), 8);
  std::vector<NdArray> frozen_before;
  for (Param* p : model.params()) {
    if (!p->trainable) frozen_before.push_back(p->value);
  }
  const NdArray context_before = model.prompts().context().value;
  const std::uint64_t text_hash = model.text_encoder().WeightsHash();
  Trainer t(model, Options(), *corpus_, TrainIndices(), 1);
  t.Run();
  std::size_t i = 0;
  for (Param* p : model.params()) {
    if (!p->trainable) {
      EXPECT_EQ(p->value, frozen_before[i++]) << p->name;
    }
  }
  EXPECT_EQ(model.text_encoder().WeightsHash(), text_hash);
  EXPECT_NE(model.prompts().context().value, context_before);
}

TEST_F(TrainerTest, BestSnapshotAndParamRoundTrip) {
  QualityModel model(TinyModel(), 10);
  Trainer t(model, Options(), *corpus_, TrainIndices(), 1);
  t.Run();
  const Checkpoint ckpt = t.Save();
  EXPECT_GE(t.best_epoch(), 1);
  EXPECT_EQ(t.best_loss(), t.epoch_losses()[t.best_epoch() - 1]);

  QualityModel restored(TinyModel(), 99);
  LoadParams(restored, ckpt);
  EXPECT_EQ(Values(restored), Values(model));
  LoadBestParams(restored, ckpt);
  EXPECT_TRUE(ckpt.Find("best/" + model.params()[0]->name) != nullptr);

  Checkpoint broken = ckpt;
  broken.blocks[0].value = NdArray({1, 1});
  ExpectErrorCode(ErrorCode::kShapeMismatch, [&] { LoadParams(restored, broken); });
}

TEST_F(TrainerTest, PredictionsAreDeterministicAndBounded) {
  QualityModel model(TinyModel(), 11);
  RenderOptions render;
  render.size = 32;
  const std::vector<std::size_t> idx = {1, 2, 47};
  const auto a = PredictSamples(model, *corpus_, idx, render, 1);
  const auto b = PredictSamples(model, *corpus_, idx, render, 2);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].sample_id, (*corpus_)[idx[i]].sample_id);
    EXPECT_EQ(a[i].prediction.score, b[i].prediction.score);
    EXPECT_GE(a[i].prediction.score, 1.0);
    EXPECT_LE(a[i].prediction.score, 5.0);
    a[i].prediction.osd.Validate(1e-9);
  }
}

}  // namespace
}  // namespace pcqa
