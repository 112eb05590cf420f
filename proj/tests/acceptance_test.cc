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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "commands.h"
#include "gradient_suite.h"
#include "pcqa/alignment.h"
#include "pcqa/checkpoint.h"
#include "pcqa/config.h"
#include "pcqa/corpus.h"
#include "pcqa/file_util.h"
#include "pcqa/kfold.h"
#include "pcqa/losses.h"
#include "pcqa/metrics.h"
#include "pcqa/model.h"
#include "pcqa/ply.h"
#include "pcqa/trainer.h"

namespace pcqa {
namespace {

constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 120.0;
constexpr double kOracleTolerance = 1e-9;
constexpr double kInvariantTolerance = 1e-12;
constexpr int kPropertyCases = 1000;
constexpr double kRecoveryThreshold = 0.6;
constexpr double kRecoverySeconds = 20.0 * 60.0;
constexpr double kAblationMargin = 0.02;
constexpr double kLogisticRmse = 1e-6;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

struct Verdict {
  int id = 0;
  std::string name;
  bool pass = false;
  bool gating = true;
  std::string detail;

  std::string Line() const {
    return "criterion " + std::to_string(id) + " " + name + ": " + (pass ? "PASS" : "FAIL") +
           " " + detail;
  }
};

Verdict Start(int id, std::string name, bool gating = true) {
  Verdict v;
  v.id = id;
  v.name = std::move(name);
  v.gating = gating;
  return v;
}

Verdict GradientSuite() {
  Verdict v = Start(1, "gradient suite");
  GradCheckOptions options;
  const auto start = Clock::now();
  const std::vector<SuiteEntry> entries = RunGradientSuite(1, options);
  const double secs = Seconds(start);
  double worst = 0.0;
  std::string worst_op;
  for (const SuiteEntry& e : entries) {
    std::cerr << "  " << e.operation << " " << Fmt(e.result.max_relative_error) << "\n";
    if (e.result.max_relative_error >= worst) {
      worst = e.result.max_relative_error;
      worst_op = e.operation;
    }
  }
  v.pass = worst < kGradTolerance && secs < kGradSeconds;
  v.detail = "(max relative error " + Fmt(worst, 3) + " at " + worst_op + " over " +
             std::to_string(entries.size()) + " operations, " + Fmt(secs, 3) + " s)";
  return v;
}

Verdict LossOracles() {
  Verdict v = Start(2, "loss oracles");
  const std::vector<double> asc = {1, 2, 3, 4, 5};
  const double emd =
      EmdLoss({{1, 0, 0, 0, 0}, asc}, {{0, 1, 0, 0, 0}, asc}).value;
  const double emd_err = std::abs(emd - std::sqrt(0.2));

  const std::vector<double> seven = {1, 2, 3, 4, 5, 6, 7};
  const double quan = QuantileLoss({{0, 0.1, 0.3, 0.4, 0.2, 0, 0}, seven},
                                   {{0.1, 0.3, 0.4, 0.2, 0, 0, 0}, seven}, kDefaultThetas)
                          .value;
  const double quan_err = std::abs(quan - 1.0);

  const double con = ContrastiveLoss(NdArray::FromRows({{1, 0}, {-1, 0}}),
                                     NdArray::FromRows({{1, 0}, {-1, 0}}), 1.0)
                         .value;
  const double con_err = std::abs(con + std::log(std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0))));

  const std::vector<double> pi = {1, 0, 0, 0, 0};
  const double p1 = OsdFromSimilarities(pi, 1.0, QualityLevels::Default().q).probs[0];
  const double e = std::exp(1.0);
  const double p1_err = std::abs(p1 - e / (e + 4.0));

  const double worst = std::max({emd_err, quan_err, con_err, p1_err});
  v.pass = worst < kOracleTolerance;
  v.detail = "(emd " + Fmt(emd, 12) + ", quantile " + Fmt(quan, 12) + ", contrastive " +
             Fmt(con, 12) + ", p1 " + Fmt(p1, 12) + " = e/(e+4); max deviation " +
             Fmt(worst, 3) + ")";
  return v;
}

Verdict DistributionInvariants() {
  Verdict v = Start(3, "distribution invariants");
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> sim(-1.0, 1.0);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  const QualityLevels levels = QualityLevels::Default();
  double sum_err = 0.0, shift_err = 0.0, sym_err = 0.0, self_emd = 0.0;
  int out_of_range = 0, zero_distance_distinct = 0;
  for (int c = 0; c < kPropertyCases; ++c) {
    std::vector<double> pi(5), shifted(5);
    const double shift = 2.0 * sim(rng);
    const double scale = c % 2 == 0 ? 1.0 : 10.0;
    for (int k = 0; k < 5; ++k) {
      pi[k] = sim(rng);
      shifted[k] = pi[k] + shift;
    }
    const auto a = OsdFromSimilarities(pi, scale, levels.q);
    const auto b = OsdFromSimilarities(shifted, scale, levels.q);
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
      total += a.probs[k];
      shift_err = std::max(shift_err, std::abs(a.probs[k] - b.probs[k]));
    }
    sum_err = std::max(sum_err, std::abs(total - 1.0));
    const double q = ScoreFromOsd(a, levels);
    out_of_range += q < 1.0 || q > 5.0;

    OpinionScoreDistribution r{std::vector<double>(5), levels.q};
    double s = 0.0;
    for (double& p : r.probs) s += (p = gamma(rng));
    for (double& p : r.probs) p /= s;
    const double ab = EmdLoss(a, r).value;
    sym_err = std::max(sym_err, std::abs(ab - EmdLoss(r, a).value));
    self_emd = std::max(self_emd, EmdLoss(a, a).value);
    zero_distance_distinct += ab == 0.0;
  }
  v.pass = sum_err <= kInvariantTolerance && shift_err <= kInvariantTolerance &&
           out_of_range == 0 && sym_err <= kInvariantTolerance && self_emd == 0.0 &&
           zero_distance_distinct == 0;
  v.detail = "(" + std::to_string(kPropertyCases) + " cases: sum error " + Fmt(sum_err, 3) +
             ", shift error " + Fmt(shift_err, 3) + ", scores out of range " +
             std::to_string(out_of_range) + ", emd asymmetry " + Fmt(sym_err, 3) +
             ", emd(a,a) max " + Fmt(self_emd, 3) + ")";
  return v;
}

struct FoldMetrics {
  double srcc = 0.0;
  double plcc = 0.0;
};

double ParseField(const std::string& line, const std::string& key) {
  const std::size_t at = line.find(key + "=");
  if (at == std::string::npos) return NAN;
  return std::stod(line.substr(at + key.size() + 1));
}

// Trains and evaluates every fold of `config_path` through the CLI commands.
std::vector<FoldMetrics> CrossValidate(const std::filesystem::path& work,
                                       const std::filesystem::path& corpus,
                                       const std::filesystem::path& config_path,
                                       const std::string& tag, int folds) {
  std::vector<FoldMetrics> out;
  for (int fold = 0; fold < folds; ++fold) {
    const auto start = Clock::now();
    CommandArgs args;
    args.config = config_path;
    args.corpus = corpus;
    args.fold = fold;
    args.out = work / (tag + "_fold" + std::to_string(fold));
    std::ostringstream sink, log;
    if (CmdTrain(args, sink, log) != kExitOk) {
      std::cerr << log.str();
      out.push_back({NAN, NAN});
      continue;
    }
    args.checkpoint = args.out / "checkpoint.pcqc";
    std::ostringstream summary;
    if (CmdEval(args, summary, log) != kExitOk) {
      std::cerr << log.str();
      out.push_back({NAN, NAN});
      continue;
    }
    const FoldMetrics m{ParseField(summary.str(), "srcc"), ParseField(summary.str(), "plcc")};
    std::cerr << "  " << tag << " fold " << fold << ": srcc " << Fmt(m.srcc, 4) << " plcc "
              << Fmt(m.plcc, 4) << " (" << Fmt(Seconds(start), 3) << " s)\n";
    out.push_back(m);
  }
  return out;
}

double MeanSrcc(const std::vector<FoldMetrics>& folds) {
  double s = 0.0;
  for (const FoldMetrics& f : folds) s += f.srcc;
  return s / static_cast<double>(folds.size());
}

std::string FoldList(const std::vector<FoldMetrics>& folds, bool plcc) {
  std::string s;
  for (const FoldMetrics& f : folds) s += (s.empty() ? "" : " ") + Fmt(plcc ? f.plcc : f.srcc, 3);
  return s;
}

std::filesystem::path WriteVariant(const std::filesystem::path& work, const std::string& name,
                                   const RunConfig& config) {
  const std::filesystem::path p = work / (name + ".cfg");
  WriteFileBytes(p, config.Canonical());
  return p;
}

struct Experiments {
  std::vector<FoldMetrics> full;
  std::vector<FoldMetrics> regression;
  std::vector<FoldMetrics> no_contrastive;
  double full_seconds = 0.0;
};

Experiments RunExperiments(const std::filesystem::path& work) {
  const RunConfig config = RunConfig::Load(PCQA_DEFAULT_CONFIG);
  CommandArgs synth;
  synth.config = PCQA_DEFAULT_CONFIG;
  synth.out = work / "corpus";
  std::ostringstream sink, log;
  if (CmdSynth(synth, sink, log) != kExitOk) std::cerr << log.str();

  Experiments e;
  const auto start = Clock::now();
  e.full = CrossValidate(work, synth.out, PCQA_DEFAULT_CONFIG, "full", config.folds);
  e.full_seconds = Seconds(start);
  RunConfig regression = config;
  regression.model.use_text = false;
  e.regression = CrossValidate(work, synth.out, WriteVariant(work, "regression", regression),
                               "regression", config.folds);
  RunConfig no_contrastive = config;
  no_contrastive.model.weights.beta = 0.0;
  e.no_contrastive = CrossValidate(work, synth.out,
                                   WriteVariant(work, "no_contrastive", no_contrastive),
                                   "no_contrastive", config.folds);
  return e;
}

Verdict SyntheticRecovery(const Experiments& e) {
  Verdict v = Start(4, "synthetic recovery", false);
  bool all = !e.full.empty();
  for (const FoldMetrics& f : e.full) {
    all = all && f.srcc >= kRecoveryThreshold && f.plcc >= kRecoveryThreshold;
  }
  v.pass = all && e.full_seconds <= kRecoverySeconds;
  v.detail = "(srcc per fold " + FoldList(e.full, false) + "; plcc per fold " +
             FoldList(e.full, true) + "; threshold " + Fmt(kRecoveryThreshold) + "; " +
             Fmt(e.full_seconds / 60.0, 3) + " min on " +
             std::to_string(std::max(1u, std::thread::hardware_concurrency())) + " core(s))";
  return v;
}

Verdict AblationDirections(const Experiments& e) {
  Verdict v = Start(5, "ablation directions", false);
  const double text = MeanSrcc(e.full), head = MeanSrcc(e.regression);
  bool con_ok = e.full.size() == e.no_contrastive.size();
  for (std::size_t i = 0; con_ok && i < e.full.size(); ++i) {
    con_ok = e.no_contrastive[i].srcc <= e.full[i].srcc + kAblationMargin;
  }
  v.pass = text >= head - kAblationMargin && con_ok && std::isfinite(text) && std::isfinite(head);
  v.detail = "(mean srcc text " + Fmt(text, 3) + " vs regression head " + Fmt(head, 3) +
             "; srcc without contrastive per fold " + FoldList(e.no_contrastive, false) +
             " vs full " + FoldList(e.full, false) + "; margin " + Fmt(kAblationMargin) + ")";
  return v;
}

Verdict DeterminismAndFormats(const std::filesystem::path& work) {
  Verdict v = Start(6, "determinism and formats");
  const std::string tiny =
      "corpus.references = 3\ncorpus.points = 800\nrender.size = 64\nrender.crop = 32\n"
      "model.patch = 8\nmodel.dim = 16\nmodel.heads = 2\ntrain.epochs = 2\ntrain.folds = 3\n";
  const std::filesystem::path cfg = work / "determinism.cfg";
  WriteFileBytes(cfg, tiny);
  CommandArgs args;
  args.config = cfg;
  args.out = work / "det_corpus";
  std::ostringstream sink, log;
  bool ok = CmdSynth(args, sink, log) == kExitOk;
  args.corpus = args.out;
  std::string ckpt[2], trace[2];
  for (int run = 0; run < 2 && ok; ++run) {
    args.out = work / ("det_run" + std::to_string(run));
    ok = CmdTrain(args, sink, log) == kExitOk;
    if (!ok) break;
    ckpt[run] = ReadFileBytes(args.out / "checkpoint.pcqc");
    trace[run] = ReadFileBytes(args.out / "loss_trace.csv");
  }
  if (!ok) std::cerr << log.str();
  const bool same_runs = ok && ckpt[0] == ckpt[1] && trace[0] == trace[1];

  const RunConfig config = RunConfig::Parse(tiny);
  const Checkpoint trained = DecodeCheckpoint(ckpt[0]);
  const bool ckpt_round_trip = EncodeCheckpoint(trained) == ckpt[0];
  QualityModel fresh(config.model, config.train.seed);
  bool frozen_same = true;
  int frozen_blocks = 0;
  for (Param* p : fresh.params()) {
    if (p->trainable) continue;
    const CheckpointBlock* b = trained.Find(p->name);
    frozen_same = frozen_same && b != nullptr && b->frozen && b->value == p->value;
    ++frozen_blocks;
  }

  const std::vector<CorpusSample> corpus = LoadCorpus(work / "det_corpus", config.corpus.scale);
  bool ply_exact = true;
  for (const CorpusSample& s : corpus) {
    const std::string bytes = WritePly(s.cloud, PlyFormat::kBinaryLittleEndian);
    ply_exact = ply_exact && ParsePly(bytes) == s.cloud &&
                WritePly(ParsePly(bytes), PlyFormat::kBinaryLittleEndian) == bytes;
  }

  const std::vector<CorpusSample> full = GenerateCorpus(RunConfig::Load(PCQA_DEFAULT_CONFIG).corpus);
  std::vector<int> refs;
  for (const CorpusSample& s : full) refs.push_back(s.reference_id);
  int leaks = 0;
  for (const FoldSplit& f : KFoldSplit(refs, 5, 1)) {
    std::set<int> test(f.test_references.begin(), f.test_references.end());
    for (std::size_t i : f.train) leaks += test.count(refs[i]) > 0;
  }

  v.pass = same_runs && ckpt_round_trip && frozen_same && frozen_blocks > 0 && ply_exact &&
           leaks == 0;
  v.detail = std::string("(repeat runs ") + (same_runs ? "bit-identical" : "DIFFER") +
             ", checkpoint round trip " + (ckpt_round_trip ? "exact" : "INEXACT") + ", " +
             std::to_string(frozen_blocks) + " frozen text blocks " +
             (frozen_same ? "unchanged" : "CHANGED") + ", " + std::to_string(corpus.size()) +
             " PLY round trips " + (ply_exact ? "exact" : "INEXACT") + ", fold leakage " +
             std::to_string(leaks) + ")";
  return v;
}

Verdict MetricOracles() {
  Verdict v = Start(7, "metric oracles");
  const double srcc = Srcc(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4});
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  double affine = 0.0;
  for (int c = 0; c < 100; ++c) {
    std::vector<double> x(30), y(30), xs(30), ys(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = n(rng);
      y[i] = x[i] + n(rng);
      xs[i] = 2.5 * x[i] + 4.0;
      ys[i] = 0.3 * y[i] - 1.0;
    }
    affine = std::max({affine, std::abs(Plcc(x, y) - Plcc(xs, ys)),
                       std::abs(Srcc(x, y) - Srcc(xs, ys))});
  }
  Logistic4 truth;
  truth.beta = {5.0, 1.0, 0.5, 0.2};
  std::vector<double> pred, mos;
  for (int i = 0; i < 41; ++i) {
    pred.push_back(-0.5 + 0.05 * i);
    mos.push_back(truth(pred.back()));
  }
  const LogisticFit fit = FitLogistic4(pred, mos);
  double se = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) se += std::pow(fit.map(pred[i]) - mos[i], 2);
  const double rmse = std::sqrt(se / static_cast<double>(pred.size()));
  v.pass = srcc == 0.8 && affine < kInvariantTolerance && rmse < kLogisticRmse;
  v.detail = "(srcc " + Fmt(srcc, 17) + ", affine deviation " + Fmt(affine, 3) +
             ", logistic mapped rmse " + Fmt(rmse, 3) + ")";
  return v;
}

}  // namespace
}  // namespace pcqa

int main() {
  using namespace pcqa;
  const std::filesystem::path work =
      std::filesystem::temp_directory_path() / ("pcqa_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);

  std::vector<Verdict> verdicts;
  auto report = [&](Verdict v) {
    std::cout << v.Line() << std::endl;
    verdicts.push_back(std::move(v));
  };
  try {
    report(GradientSuite());
    report(LossOracles());
    report(DistributionInvariants());
    const Experiments e = RunExperiments(work);
    report(SyntheticRecovery(e));
    report(AblationDirections(e));
    report(DeterminismAndFormats(work));
    report(MetricOracles());
  } catch (const std::exception& ex) {
    std::cerr << "acceptance aborted: " << ex.what() << "\n";
    std::filesystem::remove_all(work);
    return 1;
  }
  std::filesystem::remove_all(work);

  std::ofstream file("acceptance_report.txt");
  int gating_failures = 0;
  for (const Verdict& v : verdicts) {
    file << v.Line() << "\n";
    gating_failures += v.gating && !v.pass;
  }
  return gating_failures == 0 ? 0 : 1;
}
