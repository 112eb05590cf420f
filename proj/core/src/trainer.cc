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

#include "pcqa/trainer.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <thread>

#include "pcqa/error.h"
#include "pcqa/file_util.h"

namespace pcqa {

namespace {

std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::mt19937_64 rng(seq);
  return rng();
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1, threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

NdArray Scalar(double v) { return NdArray({1, 1}, v); }

}  // namespace

ViewSet RenderSample(const PointCloud& cloud, int views, const RenderOptions& render) {
  const int radius = render.radius >= 0
                         ? render.radius
                         : DefaultSplatRadius(cloud.size(), render.size, render.size);
  return RenderViews(NormalizeToUnitCube(cloud), views, render.size, render.size, radius);
}

SampleInput TrainingInput(const CorpusSample& sample, const ModelConfig& model,
                          const RenderOptions& render, std::uint64_t seed, int epoch) {
  const ViewSet views = RenderSample(sample.cloud, model.views, render);
  return MakeSampleInput(views, model.crop, model.patch, CropMode::kRandom,
                         StreamSeed(seed, static_cast<std::uint64_t>(sample.sample_id),
                                    static_cast<std::uint64_t>(epoch)));
}

SampleInput EvalInput(const PointCloud& cloud, const ModelConfig& model,
                      const RenderOptions& render) {
  const ViewSet views = RenderSample(cloud, model.views, render);
  return MakeSampleInput(views, model.crop, model.patch, CropMode::kCenter, 0);
}

Trainer::Trainer(QualityModel& model, const TrainOptions& options,
                 const std::vector<CorpusSample>& corpus,
                 std::vector<std::size_t> train_indices, std::uint64_t config_hash)
    : model_(model),
      options_(options),
      corpus_(corpus),
      train_(std::move(train_indices)),
      config_hash_(config_hash),
      params_(model.params()),
      adam_(options.adam),
      best_loss_(std::numeric_limits<double>::infinity()) {
  if (options.batch < 1 || options.epochs < 0) {
    Fail(ErrorCode::kInvalidArgument, "batch must be >= 1 and epochs >= 0");
  }
  if (train_.empty()) Fail(ErrorCode::kInvalidArgument, "empty training split");
  for (std::size_t i : train_) {
    if (i >= corpus.size()) Fail(ErrorCode::kInvalidArgument, "training index out of range");
  }
  if (model.config().contrastive_active() &&
      static_cast<long>(options.batch) * model.config().views < 2) {
    Fail(ErrorCode::kDegenerateBatch, "contrastive loss needs B*M >= 2");
  }
}

LossBreakdown Trainer::Step(const std::vector<std::size_t>& batch, int epoch) {
  const std::size_t b = batch.size();
  for (Param* p : params_) p->ZeroGrad();

  std::vector<std::unique_ptr<Graph>> graphs(b);
  std::vector<SampleTokens> tokens(b);
  ParallelFor(b, options_.threads, [&](std::size_t i) {
    const CorpusSample& s = corpus_[batch[i]];
    const SampleInput in =
        TrainingInput(s, model_.config(), options_.render, options_.seed, epoch);
    graphs[i] = std::make_unique<Graph>();
    tokens[i] = model_.EncodeSample(*graphs[i], in);
  });

  Graph head;
  std::vector<SampleTokens> spliced(b);
  std::vector<const OpinionScoreDistribution*> labels(b);
  for (std::size_t i = 0; i < b; ++i) {
    for (Var v : tokens[i].color) spliced[i].color.push_back(head.Input(v.value()));
    for (Var v : tokens[i].depth) spliced[i].depth.push_back(head.Input(v.value()));
    labels[i] = &corpus_[batch[i]].osd_label;
  }
  const HeadResult r = model_.Head(head, spliced, labels);
  head.Backward(r.loss);

  ParallelFor(b, options_.threads, [&](std::size_t i) {
    std::vector<Var> outs;
    std::vector<NdArray> seeds;
    auto add = [&](const std::vector<Var>& from, const std::vector<Var>& leaves) {
      for (std::size_t k = 0; k < from.size(); ++k) {
        outs.push_back(from[k]);
        seeds.push_back(leaves[k].grad());
      }
    };
    add(tokens[i].color, spliced[i].color);
    add(tokens[i].depth, spliced[i].depth);
    graphs[i]->Backward(outs, seeds);
  });

  head.AccumulateParamGrads();
  for (const auto& g : graphs) g->AccumulateParamGrads();
  adam_.Step(params_);
  return r.parts;
}

double Trainer::RunEpoch() {
  const int epoch = epoch_ + 1;
  std::vector<std::size_t> order = train_;
  std::mt19937_64 rng(StreamSeed(options_.seed, 0xe90c4ULL, static_cast<std::uint64_t>(epoch)));
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(rng() % (i + 1))]);
  }
  double weighted = 0.0;
  int step = 0;
  const std::size_t bs = static_cast<std::size_t>(options_.batch);
  for (std::size_t start = 0; start < order.size(); start += bs, ++step) {
    const std::vector<std::size_t> batch(
        order.begin() + static_cast<long>(start),
        order.begin() + static_cast<long>(std::min(order.size(), start + bs)));
    const LossBreakdown l = Step(batch, epoch);
    trace_.push_back({epoch, step, l});
    weighted += l.total * static_cast<double>(batch.size());
  }
  const double mean = weighted / static_cast<double>(order.size());
  epoch_ = epoch;
  epoch_losses_.push_back(mean);
  if (mean < best_loss_) {
    best_loss_ = mean;
    best_epoch_ = epoch;
    best_params_.clear();
    for (Param* p : params_) best_params_.push_back(p->value);
  }
  return mean;
}

void Trainer::Run() {
  while (epoch_ < options_.epochs) RunEpoch();
}

Checkpoint Trainer::Save() const {
  Checkpoint c;
  c.config_hash = config_hash_;
  StoreParams(model_, c);
  const std::vector<NdArray>& m = adam_.first_moments();
  const std::vector<NdArray>& v = adam_.second_moments();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!params_[i]->trainable) continue;
    c.Put("adam.m/" + params_[i]->name, m[i]);
    c.Put("adam.v/" + params_[i]->name, v[i]);
  }
  c.Put("meta/adam_steps", Scalar(static_cast<double>(adam_.steps())));
  c.Put("meta/epoch", Scalar(epoch_));
  c.Put("meta/seed", NdArray({2}, {static_cast<double>(options_.seed & 0xffffffffULL),
                                   static_cast<double>(options_.seed >> 32)}));
  c.Put("meta/best_epoch", Scalar(best_epoch_));
  c.Put("meta/best_loss", Scalar(best_epoch_ > 0 ? best_loss_ : 0.0));
  NdArray epochs({epoch_losses_.size()}, epoch_losses_);
  if (!epoch_losses_.empty()) c.Put("meta/epoch_losses", std::move(epochs));
  if (!trace_.empty()) {
    NdArray t = NdArray::Zeros(trace_.size(), 6);
    for (std::size_t i = 0; i < trace_.size(); ++i) {
      const TraceRow& r = trace_[i];
      const double row[6] = {static_cast<double>(r.epoch), static_cast<double>(r.step),
                             r.loss.emd, r.loss.quan, r.loss.con, r.loss.total};
      std::copy(row, row + 6, t.data() + i * 6);
    }
    c.Put("meta/trace", std::move(t));
  }
  for (std::size_t i = 0; i < best_params_.size(); ++i) {
    c.Put("best/" + params_[i]->name, best_params_[i], !params_[i]->trainable);
  }
  return c;
}

void Trainer::Restore(const Checkpoint& ckpt) {
  if (ckpt.config_hash != config_hash_) {
    Fail(ErrorCode::kHashMismatch, "checkpoint was written for a different configuration");
  }
  const NdArray& seed = ckpt.Get("meta/seed");
  const std::uint64_t saved_seed = static_cast<std::uint64_t>(seed[0]) |
                                   (static_cast<std::uint64_t>(seed[1]) << 32);
  if (saved_seed != options_.seed) {
    Fail(ErrorCode::kHashMismatch, "checkpoint seed differs from the run seed");
  }
  LoadParams(model_, ckpt);
  std::vector<NdArray>& m = adam_.first_moments();
  std::vector<NdArray>& v = adam_.second_moments();
  m.clear();
  v.clear();
  for (Param* p : params_) {
    if (p->trainable && ckpt.Find("adam.m/" + p->name) != nullptr) {
      m.push_back(ckpt.Get("adam.m/" + p->name));
      v.push_back(ckpt.Get("adam.v/" + p->name));
    } else {
      m.emplace_back(p->value.shape(), 0.0);
      v.emplace_back(p->value.shape(), 0.0);
    }
  }
  adam_.set_steps(static_cast<std::uint64_t>(ckpt.Get("meta/adam_steps")[0]));
  if (adam_.steps() == 0) {
    m.clear();
    v.clear();
  }
  epoch_ = static_cast<int>(ckpt.Get("meta/epoch")[0]);
  best_epoch_ = static_cast<int>(ckpt.Get("meta/best_epoch")[0]);
  best_loss_ = best_epoch_ > 0 ? ckpt.Get("meta/best_loss")[0]
                               : std::numeric_limits<double>::infinity();
  epoch_losses_.clear();
  if (const CheckpointBlock* e = ckpt.Find("meta/epoch_losses")) {
    epoch_losses_.assign(e->value.values().begin(), e->value.values().end());
  }
  trace_.clear();
  if (const CheckpointBlock* t = ckpt.Find("meta/trace")) {
    for (std::size_t i = 0; i < t->value.rows(); ++i) {
      TraceRow r;
      r.epoch = static_cast<int>(t->value.at(i, 0));
      r.step = static_cast<int>(t->value.at(i, 1));
      r.loss = {t->value.at(i, 2), t->value.at(i, 3), t->value.at(i, 4), t->value.at(i, 5)};
      trace_.push_back(r);
    }
  }
  best_params_.clear();
  if (best_epoch_ > 0) {
    for (Param* p : params_) best_params_.push_back(ckpt.Get("best/" + p->name));
  }
}

std::string TraceCsv(const std::vector<TraceRow>& trace) {
  std::string out = "epoch,step,l_emd,l_quan,l_con,total\n";
  for (const TraceRow& r : trace) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.step) + "," +
           FormatDouble(r.loss.emd) + "," + FormatDouble(r.loss.quan) + "," +
           FormatDouble(r.loss.con) + "," + FormatDouble(r.loss.total) + "\n";
  }
  return out;
}

void StoreParams(QualityModel& model, Checkpoint& ckpt, const std::string& prefix) {
  for (Param* p : model.params()) ckpt.Put(prefix + p->name, p->value, !p->trainable);
}

void LoadParams(QualityModel& model, const Checkpoint& ckpt, const std::string& prefix) {
  for (Param* p : model.params()) {
    const NdArray& v = ckpt.Get(prefix + p->name);
    if (!v.SameShape(p->value)) {
      Fail(ErrorCode::kShapeMismatch, p->name + ": checkpoint " + v.ShapeString() +
                                          " vs model " + p->value.ShapeString());
    }
    p->value = v;
  }
}

void LoadBestParams(QualityModel& model, const Checkpoint& ckpt) {
  const bool has_best = !model.params().empty() &&
                        ckpt.Find("best/" + model.params().front()->name) != nullptr;
  LoadParams(model, ckpt, has_best ? "best/" : "");
}

std::vector<SamplePrediction> PredictSamples(QualityModel& model,
                                             const std::vector<CorpusSample>& corpus,
                                             const std::vector<std::size_t>& indices,
                                             const RenderOptions& render, int threads) {
  std::vector<SamplePrediction> out(indices.size());
  ParallelFor(indices.size(), threads, [&](std::size_t i) {
    const CorpusSample& s = corpus.at(indices[i]);
    out[i].sample_id = s.sample_id;
    out[i].prediction = model.Predict(EvalInput(s.cloud, model.config(), render));
  });
  return out;
}

}  // namespace pcqa
