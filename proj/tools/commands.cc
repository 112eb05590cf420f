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

#include "commands.h"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <ostream>

#include "gradient_suite.h"
#include "pcqa/checkpoint.h"
#include "pcqa/corpus.h"
#include "pcqa/error.h"
#include "pcqa/file_util.h"
#include "pcqa/image_io.h"
#include "pcqa/kfold.h"
#include "pcqa/metrics.h"
#include "pcqa/pca.h"
#include "pcqa/ply.h"
#include "pcqa/trainer.h"

namespace pcqa {

namespace {

constexpr double kGradTolerance = 1e-4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kOddContextLength:
    case ErrorCode::kThetaOutOfRange:
    case ErrorCode::kTooFewReferences:
      return kExitConfig;
    default:
      return kExitData;
  }
}

// Runs a command body, mapping library errors to exit codes.
int Guard(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitData;
  }
}

void RequirePath(const std::filesystem::path& p, const char* flag) {
  if (p.empty()) Fail(ErrorCode::kConfig, std::string("missing required flag ") + flag);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  WriteFileBytes(path, text);
}

FoldSplit SelectFold(const RunConfig& config, const std::vector<CorpusSample>& corpus,
                     int fold) {
  std::vector<int> refs;
  for (const CorpusSample& s : corpus) refs.push_back(s.reference_id);
  const std::vector<FoldSplit> folds = KFoldSplit(refs, config.folds, config.train.seed);
  if (fold < 0 || fold >= static_cast<int>(folds.size())) {
    Fail(ErrorCode::kConfig, "fold " + std::to_string(fold) + " outside [0, " +
                                 std::to_string(folds.size()) + ")");
  }
  return folds[static_cast<std::size_t>(fold)];
}

std::string SampleName(int id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%04d", id);
  return buf;
}

std::string PredictionHeader(std::size_t k) {
  std::string h = "sample_id";
  for (std::size_t i = 1; i <= k; ++i) h += ",p" + std::to_string(i);
  return h + ",score\n";
}

std::string PredictionRow(const std::string& id, const Prediction& p, std::size_t k) {
  std::string row = id;
  for (std::size_t i = 0; i < k; ++i) {
    row += ",";
    if (i < p.osd.size()) row += FormatDouble(p.osd.probs[i]);
  }
  return row + "," + FormatDouble(p.score) + "\n";
}

std::unique_ptr<QualityModel> LoadModel(const RunConfig& config,
                                        const std::filesystem::path& checkpoint) {
  RequirePath(checkpoint, "--checkpoint");
  auto model = std::make_unique<QualityModel>(config.model, config.train.seed);
  LoadBestParams(*model, LoadCheckpoint(checkpoint, config.Hash()));
  return model;
}

std::size_t ArgmaxLevel(const Prediction& p, const QualityLevels& levels) {
  if (!p.osd.probs.empty()) {
    return static_cast<std::size_t>(
        std::max_element(p.osd.probs.begin(), p.osd.probs.end()) - p.osd.probs.begin());
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (std::abs(levels.q[k] - p.score) < std::abs(levels.q[best] - p.score)) best = k;
  }
  return best;
}

}  // namespace

RunConfig ResolveConfig(const CommandArgs& args) {
  RunConfig config = args.config.empty() ? RunConfig::Parse("") : RunConfig::Load(args.config);
  if (args.seed) config.SetSeed(*args.seed);
  return config;
}

int CmdSynth(const CommandArgs& args, std::ostream& out, std::ostream& log) {
  return Guard(log, [&] {
    RequirePath(args.out, "--out");
    const RunConfig config = ResolveConfig(args);
    std::vector<CorpusSample> samples = GenerateCorpus(config.corpus);
    std::filesystem::create_directories(args.out);
    WriteCorpus(args.out, samples);
    WriteText(args.out / "run_meta.txt", RunMetadata(config, "synth"));
    out << "wrote " << samples.size() << " samples to " << args.out.string() << "\n";
    return kExitOk;
  });
}

int CmdProject(const CommandArgs& args, std::ostream& out, std::ostream& log) {
  return Guard(log, [&] {
    RequirePath(args.out, "--out");
    RequirePath(args.corpus, "--corpus");
    const RunConfig config = ResolveConfig(args);
    const std::vector<CorpusSample> corpus = LoadCorpus(args.corpus, config.corpus.scale);
    for (const CorpusSample& s : corpus) {
      const std::filesystem::path dir = args.out / SampleName(s.sample_id);
      std::filesystem::create_directories(dir);
      const ViewSet views = RenderSample(s.cloud, config.model.views, config.train.render);
      for (const ViewImage& v : views.views) {
        const std::string stem = "view_" + std::to_string(v.view_index);
        SaveView(v, dir / (stem + ".ppm"), dir / (stem + "_depth.pcqt"));
        SaveMask(v, dir / (stem + "_mask.pcqt"));
      }
    }
    WriteText(args.out / "run_meta.txt", RunMetadata(config, "project"));
    out << "rendered " << corpus.size() << " samples x " << config.model.views
        << " views to " << args.out.string() << "\n";
    return kExitOk;
  });
}

int CmdTrain(const CommandArgs& args, std::ostream& out, std::ostream& log) {
  return Guard(log, [&] {
    RequirePath(args.out, "--out");
    RequirePath(args.corpus, "--corpus");
    const RunConfig config = ResolveConfig(args);
    const std::vector<CorpusSample> corpus = LoadCorpus(args.corpus, config.corpus.scale);
    const FoldSplit split = SelectFold(config, corpus, args.fold);
    QualityModel model(config.model, config.train.seed);
    Trainer trainer(model, config.train, corpus, split.train, config.Hash());
    if (!args.checkpoint.empty()) {
      trainer.Restore(LoadCheckpoint(args.checkpoint, config.Hash()));
      log << "resumed at epoch " << trainer.epochs_done() << "\n";
    }
    std::filesystem::create_directories(args.out);
    while (trainer.epochs_done() < config.train.epochs) {
      const double loss = trainer.RunEpoch();
      log << "epoch " << trainer.epochs_done() << " loss " << FormatDouble(loss) << "\n";
    }
    SaveCheckpoint(args.out / "checkpoint.pcqc", trainer.Save());
    WriteText(args.out / "loss_trace.csv", TraceCsv(trainer.trace()));
    WriteText(args.out / "run_meta.txt", RunMetadata(config, "train"));
    out << "best_epoch=" << trainer.best_epoch()
        << ",best_loss=" << FormatDouble(trainer.best_loss()) << "\n";
    return kExitOk;
  });
}

int CmdEval(const CommandArgs& args, std::ostream& out, std::ostream& log) {
  return Guard(log, [&] {
    RequirePath(args.out, "--out");
    RequirePath(args.corpus, "--corpus");
    const RunConfig config = ResolveConfig(args);
    const std::vector<CorpusSample> corpus = LoadCorpus(args.corpus, config.corpus.scale);
    const FoldSplit split = SelectFold(config, corpus, args.fold);
    auto model = LoadModel(config, args.checkpoint);
    const auto preds =
        PredictSamples(*model, corpus, split.test, config.train.render, config.train.threads);
    std::vector<double> pred, truth;
    std::vector<std::string> ids;
    const std::size_t k = config.model.levels.size();
    std::string pred_csv = PredictionHeader(k);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const CorpusSample& s = corpus[split.test[i]];
      pred.push_back(preds[i].prediction.score);
      truth.push_back(s.true_score);
      ids.push_back(SampleName(s.sample_id));
      pred_csv += PredictionRow(ids.back(), preds[i].prediction, k);
    }
    const EvalReport report = Evaluate(pred, truth, ids);
    std::filesystem::create_directories(args.out);
    WriteText(args.out / "eval_report.csv", report.Csv());
    WriteText(args.out / "predictions.csv", pred_csv);
    const auto& b = report.fit.map.beta;
    WriteText(args.out / "summary.txt",
              report.SummaryLine() + "\nlogistic=" + FormatDouble(b[0]) + "," +
                  FormatDouble(b[1]) + "," + FormatDouble(b[2]) + "," + FormatDouble(b[3]) +
                  "\nlogistic_converged=" + (report.fit.converged ? "true" : "false") + "\n");
    WriteText(args.out / "run_meta.txt", RunMetadata(config, "eval"));
    if (!report.fit.converged) log << "warning: logistic fit hit the iteration limit\n";
    out << report.SummaryLine() << "\n";
    return kExitOk;
  });
}

int CmdPredict(const CommandArgs& args, std::ostream& out, std::ostream& log) {
  return Guard(log, [&] {
    RequirePath(args.ply, "--ply");
    const RunConfig config = ResolveConfig(args);
    auto model = LoadModel(config, args.checkpoint);
    const PointCloud cloud = ReadPlyFile(args.ply);
    const Prediction p = model->Predict(EvalInput(cloud, config.model, config.train.render));
    const std::size_t k = config.model.levels.size();
    out << PredictionHeader(k) << PredictionRow(args.ply.stem().string(), p, k);
    return kExitOk;
  });
}

int CmdGradcheck(const CommandArgs& args, std::ostream& out, std::ostream& log) {
  return Guard(log, [&] {
    const RunConfig config = ResolveConfig(args);
    GradCheckOptions options;
    options.step = config.gradcheck.step;
    options.coords_per_param = static_cast<std::size_t>(config.gradcheck.samples);
    options.seed = config.train.seed;
    const std::vector<SuiteEntry> entries = RunGradientSuite(config.train.seed, options);
    bool ok = true;
    out << "operation,max_relative_error,worst_param,worst_index,analytic,numeric,coords\n";
    for (const SuiteEntry& e : entries) {
      out << e.operation << "," << FormatDouble(e.result.max_relative_error) << ","
          << e.result.worst_param << "," << e.result.worst_index << ","
          << FormatDouble(e.result.worst_analytic) << ","
          << FormatDouble(e.result.worst_numeric) << "," << e.result.coords_checked << "\n";
      ok = ok && e.result.max_relative_error < kGradTolerance;
    }
    if (!ok) {
      log << "gradient check failed (tolerance " << kGradTolerance << ")\n";
      return kExitCheck;
    }
    return kExitOk;
  });
}

int CmdPca(const CommandArgs& args, std::ostream& out, std::ostream& log) {
  return Guard(log, [&] {
    RequirePath(args.out, "--out");
    RequirePath(args.corpus, "--corpus");
    const RunConfig config = ResolveConfig(args);
    const std::vector<CorpusSample> corpus = LoadCorpus(args.corpus, config.corpus.scale);
    auto model = LoadModel(config, args.checkpoint);
    std::vector<std::size_t> all(corpus.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto preds =
        PredictSamples(*model, corpus, all, config.train.render, config.train.threads);
    NdArray features = NdArray::Zeros(preds.size(), static_cast<std::size_t>(config.model.dim));
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const std::vector<double>& f = preds[i].prediction.feature;
      std::copy(f.begin(), f.end(), features.data() + i * features.cols());
    }
    const Pca2d pca = ComputePca2d(features);
    if (pca.rank_deficient) log << "warning: features are rank deficient\n";
    std::string csv = "sample_id,pc1,pc2,argmax_level,level_name\n";
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const std::size_t k = ArgmaxLevel(preds[i].prediction, config.model.levels);
      csv += SampleName(preds[i].sample_id) + "," + FormatDouble(pca.coords.at(i, 0)) + "," +
             FormatDouble(pca.coords.at(i, 1)) + "," + std::to_string(k + 1) + "," +
             config.model.levels.descriptions[k] + "\n";
    }
    std::filesystem::create_directories(args.out);
    WriteText(args.out / "pca.csv", csv);
    WriteText(args.out / "run_meta.txt", RunMetadata(config, "pca"));
    out << "wrote " << preds.size() << " rows to " << (args.out / "pca.csv").string() << "\n";
    return kExitOk;
  });
}

}  // namespace pcqa
