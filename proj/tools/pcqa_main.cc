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

#include <CLI11.hpp>
#include <iostream>

#include "commands.h"

int main(int argc, char** argv) {
  CLI::App app{"pcqa: point-cloud quality prediction from opinion-score distributions"};
  app.require_subcommand(1);
  pcqa::CommandArgs args;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config, "Configuration file (section.key = value)");
    cmd->add_option("--seed", seed, "Overrides run.seed");
  };
  auto* synth = app.add_subcommand("synth", "Generate the synthetic corpus");
  add_common(synth);
  synth->add_option("--out", args.out, "Output directory")->required();

  auto* project = app.add_subcommand("project", "Render color/depth views of a corpus");
  add_common(project);
  project->add_option("--corpus", args.corpus, "Corpus directory")->required();
  project->add_option("--out", args.out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train on one fold of a corpus");
  add_common(train);
  train->add_option("--corpus", args.corpus, "Corpus directory")->required();
  train->add_option("--fold", args.fold, "Fold index");
  train->add_option("--out", args.out, "Output directory")->required();
  train->add_option("--checkpoint", args.checkpoint, "Checkpoint to resume from");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a held-out fold");
  add_common(eval);
  eval->add_option("--corpus", args.corpus, "Corpus directory")->required();
  eval->add_option("--fold", args.fold, "Fold index");
  eval->add_option("--checkpoint", args.checkpoint, "Trained checkpoint")->required();
  eval->add_option("--out", args.out, "Output directory")->required();

  auto* predict = app.add_subcommand("predict", "Predict the OSD and score of one PLY");
  add_common(predict);
  predict->add_option("--checkpoint", args.checkpoint, "Trained checkpoint")->required();
  predict->add_option("ply", args.ply, "Point cloud (PLY)")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  add_common(gradcheck);

  auto* pca = app.add_subcommand("pca", "2-D PCA of the fused visual features");
  add_common(pca);
  pca->add_option("--corpus", args.corpus, "Corpus directory")->required();
  pca->add_option("--checkpoint", args.checkpoint, "Trained checkpoint")->required();
  pca->add_option("--out", args.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcqa::kExitConfig;
  }
  for (CLI::App* cmd : {synth, project, train, eval, predict, gradcheck, pca}) {
    if (cmd->count("--seed") > 0) args.seed = seed;
  }

  std::ostream& out = std::cout;
  std::ostream& log = std::cerr;
  if (*synth) return pcqa::CmdSynth(args, out, log);
  if (*project) return pcqa::CmdProject(args, out, log);
  if (*train) return pcqa::CmdTrain(args, out, log);
  if (*eval) return pcqa::CmdEval(args, out, log);
  if (*predict) return pcqa::CmdPredict(args, out, log);
  if (*gradcheck) return pcqa::CmdGradcheck(args, out, log);
  if (*pca) return pcqa::CmdPca(args, out, log);
  return pcqa::kExitConfig;
}
