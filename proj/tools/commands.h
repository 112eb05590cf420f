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

#ifndef PCQA_TOOLS_COMMANDS_H_
#define PCQA_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "pcqa/config.h"

namespace pcqa {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitCheck = 4;

struct CommandArgs {
  std::filesystem::path config;       // empty: built-in defaults
  std::filesystem::path out;
  std::filesystem::path corpus;
  std::filesystem::path checkpoint;
  std::filesystem::path ply;
  int fold = 0;
  std::optional<std::uint64_t> seed;
};

// Each command writes its primary outputs under args.out and returns an
// exit code; messages go to `log`, results meant for piping to `out`.
int CmdSynth(const CommandArgs& args, std::ostream& out, std::ostream& log);
int CmdProject(const CommandArgs& args, std::ostream& out, std::ostream& log);
int CmdTrain(const CommandArgs& args, std::ostream& out, std::ostream& log);
int CmdEval(const CommandArgs& args, std::ostream& out, std::ostream& log);
int CmdPredict(const CommandArgs& args, std::ostream& out, std::ostream& log);
int CmdGradcheck(const CommandArgs& args, std::ostream& out, std::ostream& log);
int CmdPca(const CommandArgs& args, std::ostream& out, std::ostream& log);

// Loads the config (or defaults) and applies the --seed override.
RunConfig ResolveConfig(const CommandArgs& args);

}  // namespace pcqa

#endif  // PCQA_TOOLS_COMMANDS_H_
