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

#include "pcqa/config.h"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pcqa/error.h"
#include "pcqa/file_util.h"

namespace pcqa {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitList(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = s.find(',', pos);
    out.emplace_back(Trim(s.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

[[noreturn]] void BadValue(const std::string& key, std::string_view value) {
  Fail(ErrorCode::kConfig, "bad value for " + key + ": '" + std::string(value) + "'");
}

template <typename T>
T ParseNumber(const std::string& key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) BadValue(key, value);
  return out;
}

bool ParseBool(const std::string& key, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  BadValue(key, value);
}

std::vector<double> ParseDoubles(const std::string& key, std::string_view value) {
  std::vector<double> out;
  for (const std::string& item : SplitList(value)) {
    out.push_back(ParseNumber<double>(key, item));
  }
  return out;
}

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string JoinDoubles(const std::vector<double>& v) {
  std::vector<std::string> items;
  for (double x : v) items.push_back(FormatDouble(x));
  return Join(items);
}

std::string Bool(bool b) { return b ? "true" : "false"; }

struct Key {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, std::string_view)> set;
};

template <typename T>
Key IntKey(T RunConfig::*outer, int T::*field) {
  return {[=](const RunConfig& c) { return std::to_string((c.*outer).*field); },
          [=](RunConfig& c, const std::string& k, std::string_view v) {
            (c.*outer).*field = ParseNumber<int>(k, v);
          }};
}

template <typename T>
Key DoubleKey(T RunConfig::*outer, double T::*field) {
  return {[=](const RunConfig& c) { return FormatDouble((c.*outer).*field); },
          [=](RunConfig& c, const std::string& k, std::string_view v) {
            (c.*outer).*field = ParseNumber<double>(k, v);
          }};
}

template <typename T>
Key BoolKey(T RunConfig::*outer, bool T::*field) {
  return {[=](const RunConfig& c) { return Bool((c.*outer).*field); },
          [=](RunConfig& c, const std::string& k, std::string_view v) {
            (c.*outer).*field = ParseBool(k, v);
          }};
}

const std::map<std::string, Key>& Keys() {
  static const std::map<std::string, Key> keys = [] {
    std::map<std::string, Key> k;
    k["corpus.references"] = IntKey(&RunConfig::corpus, &CorpusOptions::references);
    k["corpus.points"] = IntKey(&RunConfig::corpus, &CorpusOptions::points_per_reference);
    k["corpus.score_min"] = {
        [](const RunConfig& c) { return FormatDouble(c.corpus.scale.q_min); },
        [](RunConfig& c, const std::string& key, std::string_view v) {
          c.corpus.scale.q_min = ParseNumber<double>(key, v);
        }};
    k["corpus.score_max"] = {
        [](const RunConfig& c) { return FormatDouble(c.corpus.scale.q_max); },
        [](RunConfig& c, const std::string& key, std::string_view v) {
          c.corpus.scale.q_max = ParseNumber<double>(key, v);
        }};
    k["corpus.options"] = {
        [](const RunConfig& c) { return std::to_string(c.corpus.scale.options); },
        [](RunConfig& c, const std::string& key, std::string_view v) {
          c.corpus.scale.options = ParseNumber<int>(key, v);
        }};
    k["run.seed"] = {[](const RunConfig& c) { return std::to_string(c.train.seed); },
                     [](RunConfig& c, const std::string& key, std::string_view v) {
                       c.SetSeed(ParseNumber<std::uint64_t>(key, v));
                     }};
    k["render.size"] = {[](const RunConfig& c) { return std::to_string(c.train.render.size); },
                        [](RunConfig& c, const std::string& key, std::string_view v) {
                          c.train.render.size = ParseNumber<int>(key, v);
                        }};
    k["render.radius"] = {
        [](const RunConfig& c) {
          return c.train.render.radius < 0 ? std::string("auto")
                                           : std::to_string(c.train.render.radius);
        },
        [](RunConfig& c, const std::string& key, std::string_view v) {
          c.train.render.radius = v == "auto" ? -1 : ParseNumber<int>(key, v);
          if (v != "auto" && c.train.render.radius < 0) BadValue(key, v);
        }};
    k["render.views"] = IntKey(&RunConfig::model, &ModelConfig::views);
    k["render.crop"] = IntKey(&RunConfig::model, &ModelConfig::crop);
    k["model.patch"] = IntKey(&RunConfig::model, &ModelConfig::patch);
    k["model.dim"] = IntKey(&RunConfig::model, &ModelConfig::dim);
    k["model.blocks"] = IntKey(&RunConfig::model, &ModelConfig::blocks);
    k["model.heads"] = IntKey(&RunConfig::model, &ModelConfig::heads);
    k["model.mlp_ratio"] = DoubleKey(&RunConfig::model, &ModelConfig::mlp_ratio);
    k["model.context_tokens"] = IntKey(&RunConfig::model, &ModelConfig::context_tokens);
    k["model.prompt_position"] = {
        [](const RunConfig& c) {
          return std::string(PromptPositionName(c.model.prompt_position));
        },
        [](RunConfig& c, const std::string& key, std::string_view v) {
          const auto p = ParsePromptPosition(v);
          if (!p) BadValue(key, v);
          c.model.prompt_position = *p;
        }};
    k["model.text_blocks"] = IntKey(&RunConfig::model, &ModelConfig::text_blocks);
    k["model.text_heads"] = IntKey(&RunConfig::model, &ModelConfig::text_heads);
    k["model.scale_mode"] = {
        [](const RunConfig& c) { return std::string(ScaleModeName(c.model.scale_mode)); },
        [](RunConfig& c, const std::string& key, std::string_view v) {
          const auto m = ParseScaleMode(v);
          if (!m) BadValue(key, v);
          c.model.scale_mode = *m;
        }};
    k["model.scale"] = DoubleKey(&RunConfig::model, &ModelConfig::scale);
    k["model.use_color"] = BoolKey(&RunConfig::model, &ModelConfig::use_color);
    k["model.use_depth"] = BoolKey(&RunConfig::model, &ModelConfig::use_depth);
    k["model.use_text"] = BoolKey(&RunConfig::model, &ModelConfig::use_text);
    k["levels.q"] = {[](const RunConfig& c) { return JoinDoubles(c.model.levels.q); },
                     [](RunConfig& c, const std::string& key, std::string_view v) {
                       c.model.levels.q = ParseDoubles(key, v);
                     }};
    k["levels.names"] = {
        [](const RunConfig& c) { return Join(c.model.levels.descriptions); },
        [](RunConfig& c, const std::string&, std::string_view v) {
          c.model.levels.descriptions = SplitList(v);
        }};
    k["loss.alpha"] = {[](const RunConfig& c) { return FormatDouble(c.model.weights.alpha); },
                       [](RunConfig& c, const std::string& key, std::string_view v) {
                         c.model.weights.alpha = ParseNumber<double>(key, v);
                       }};
    k["loss.beta"] = {[](const RunConfig& c) { return FormatDouble(c.model.weights.beta); },
                      [](RunConfig& c, const std::string& key, std::string_view v) {
                        c.model.weights.beta = ParseNumber<double>(key, v);
                      }};
    k["loss.tau1"] = {[](const RunConfig& c) { return FormatDouble(c.model.weights.tau1); },
                      [](RunConfig& c, const std::string& key, std::string_view v) {
                        c.model.weights.tau1 = ParseNumber<double>(key, v);
                      }};
    k["loss.thetas"] = {[](const RunConfig& c) { return JoinDoubles(c.model.thetas); },
                        [](RunConfig& c, const std::string& key, std::string_view v) {
                          c.model.thetas = ParseDoubles(key, v);
                        }};
    k["loss.exclude_positive"] = BoolKey(&RunConfig::model, &ModelConfig::exclude_positive);
    k["train.batch"] = IntKey(&RunConfig::train, &TrainOptions::batch);
    k["train.epochs"] = IntKey(&RunConfig::train, &TrainOptions::epochs);
    k["train.threads"] = IntKey(&RunConfig::train, &TrainOptions::threads);
    k["train.lr"] = {[](const RunConfig& c) { return FormatDouble(c.train.adam.lr); },
                     [](RunConfig& c, const std::string& key, std::string_view v) {
                       c.train.adam.lr = ParseNumber<double>(key, v);
                     }};
    k["train.weight_decay"] = {
        [](const RunConfig& c) { return FormatDouble(c.train.adam.weight_decay); },
        [](RunConfig& c, const std::string& key, std::string_view v) {
          c.train.adam.weight_decay = ParseNumber<double>(key, v);
        }};
    k["train.folds"] = {[](const RunConfig& c) { return std::to_string(c.folds); },
                        [](RunConfig& c, const std::string& key, std::string_view v) {
                          c.folds = ParseNumber<int>(key, v);
                        }};
    k["gradcheck.step"] = DoubleKey(&RunConfig::gradcheck, &GradCheckSettings::step);
    k["gradcheck.samples"] = IntKey(&RunConfig::gradcheck, &GradCheckSettings::samples);
    return k;
  }();
  return keys;
}

}  // namespace

RunConfig RunConfig::Parse(std::string_view text) {
  RunConfig config;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    const auto it = Keys().find(key);
    if (it == Keys().end()) {
      Fail(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      Fail(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    }
    it->second.set(config, key, value);
  }
  config.Validate();
  return config;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFileBytes(path);
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, std::string("cannot read config: ") + e.what());
  }
  return Parse(text);
}

std::string RunConfig::Canonical() const {
  std::string out;
  for (const auto& [key, k] : Keys()) out += key + " = " + k.get(*this) + "\n";
  return out;
}

std::uint64_t RunConfig::Hash() const {
  std::string text;
  for (const auto& [key, k] : Keys()) {
    if (key == "train.epochs" || key == "train.threads") continue;
    text += key + " = " + k.get(*this) + "\n";
  }
  return Fnv1a64(text);
}

std::vector<std::string> RunConfig::Deviations() const {
  std::vector<std::string> out;
  auto note = [&](const std::string& key, const std::string& value, const std::string& ref) {
    out.push_back(key + " = " + value + " (reference: " + ref + ")");
  };
  if (model.scale_mode != ScaleMode::kUnit) {
    note("model.scale_mode", std::string(ScaleModeName(model.scale_mode)) + ", scale " +
                                 FormatDouble(model.scale),
         "unit scale");
  }
  note("loss.tau1", FormatDouble(model.weights.tau1), "not specified");
  if (train.adam.lr != 4e-6) note("train.lr", FormatDouble(train.adam.lr), "4e-06");
  if (train.batch != 16) note("train.batch", std::to_string(train.batch), "16");
  if (model.crop != 224) note("render.crop", std::to_string(model.crop), "224");
  if (model.dim != 768 || model.blocks != 12 || model.patch != 16) {
    note("model", "dim " + std::to_string(model.dim) + ", blocks " +
                      std::to_string(model.blocks) + ", patch " + std::to_string(model.patch),
         "pretrained ViT-B/16");
  }
  note("text.pooling", "mean over tokens + frozen projection", "end-of-text token");
  note("text.weights", "seeded random, frozen", "pretrained CLIP text encoder");
  if (model.exclude_positive) note("loss.exclude_positive", "true", "full denominator");
  if (model.weights.alpha != 1.0 / static_cast<double>(model.levels.size())) {
    note("loss.alpha", FormatDouble(model.weights.alpha), "1/K");
  }
  if (model.weights.beta != 0.08) note("loss.beta", FormatDouble(model.weights.beta), "0.08");
  if (!model.use_text) note("model.use_text", "false", "text branch on");
  if (!model.use_color) note("model.use_color", "false", "color branch on");
  if (!model.use_depth) note("model.use_depth", "false", "depth branch on");
  if (model.prompt_position != PromptPosition::kMiddle) {
    note("model.prompt_position", std::string(PromptPositionName(model.prompt_position)),
         "middle");
  }
  if (model.context_tokens != 16) {
    note("model.context_tokens", std::to_string(model.context_tokens), "16");
  }
  if (model.views != 6) note("render.views", std::to_string(model.views), "6");
  return out;
}

void RunConfig::SetSeed(std::uint64_t seed) {
  train.seed = seed;
  corpus.seed = seed;
}

void RunConfig::Validate() const {
  try {
    model.Validate();
    if (model.levels.size() != model.levels.descriptions.size()) {
      Fail(ErrorCode::kConfig, "levels.q and levels.names differ in length");
    }
    if (corpus.references < 1 || corpus.points_per_reference < 8 ||
        corpus.scale.options < 2 || !(corpus.scale.q_max > corpus.scale.q_min)) {
      Fail(ErrorCode::kConfig, "corpus settings out of range");
    }
    if (train.render.size < 8 || train.render.size < model.crop) {
      Fail(ErrorCode::kConfig, "render.size must be >= 8 and >= render.crop");
    }
    if (train.batch < 1 || train.epochs < 0 || train.threads < 1 || folds < 2 ||
        !(train.adam.lr >= 0) || !(train.adam.weight_decay >= 0)) {
      Fail(ErrorCode::kConfig, "training settings out of range");
    }
    if (!(gradcheck.step > 0) || gradcheck.samples < 1) {
      Fail(ErrorCode::kConfig, "gradcheck settings out of range");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, e.what());
  }
}

std::string RunMetadata(const RunConfig& config, std::string_view command) {
  std::ostringstream out;
  out << "command = " << command << "\n";
  out << "config_hash = " << std::hex << config.Hash() << std::dec << "\n";
  out << "\n[config]\n" << config.Canonical();
  out << "\n[deviations]\n";
  for (const std::string& d : config.Deviations()) out << d << "\n";
  return out.str();
}

}  // namespace pcqa
