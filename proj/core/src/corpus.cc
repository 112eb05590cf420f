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

#include "pcqa/corpus.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pcqa/error.h"
#include "pcqa/file_util.h"
#include "pcqa/ply.h"

namespace pcqa {

std::vector<double> ScoreScale::Options() const {
  if (options < 2 || !(q_max > q_min)) {
    Fail(ErrorCode::kInvalidArgument, "score scale needs >= 2 options and q_max > q_min");
  }
  std::vector<double> out(options);
  for (int i = 0; i < options; ++i) {
    out[i] = q_min + (q_max - q_min) * i / (options - 1);
  }
  return out;
}

double KindScoreOffset(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kGeomNoise: return -0.3;
    case DistortionKind::kColorNoise: return 0.0;
    case DistortionKind::kDownsample: return 0.3;
    case DistortionKind::kQuantize: return -0.15;
  }
  return 0.0;
}

OracleRating OracleOsd(DistortionKind kind, int level, const ScoreScale& scale) {
  if (level < kMinDistortionLevel || level > kMaxDistortionLevel) {
    Fail(ErrorCode::kInvalidArgument, "level out of range: " + std::to_string(level));
  }
  constexpr double kSigma = 0.7;
  OracleRating r;
  r.true_score = scale.q_max - (scale.q_max - scale.q_min) * (level - 1) / 5.0 +
                 KindScoreOffset(kind);
  r.osd.anchors = scale.Options();
  r.osd.probs.resize(r.osd.anchors.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < r.osd.anchors.size(); ++i) {
    const double z = (r.osd.anchors[i] - r.true_score) / kSigma;
    r.osd.probs[i] = std::exp(-0.5 * z * z);
    sum += r.osd.probs[i];
  }
  for (double& p : r.osd.probs) p /= sum;
  return r;
}

namespace {

using std::numbers::pi;

struct Hsv {
  double h, s, v;
};

Rgb HsvToRgb(Hsv c) {
  const double h = std::fmod(std::fmod(c.h, 1.0) + 1.0, 1.0) * 6.0;
  const int i = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = c.v * (1 - c.s), q = c.v * (1 - c.s * f),
               t = c.v * (1 - c.s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (i) {
    case 0: r = c.v; g = t; b = p; break;
    case 1: r = q; g = c.v; b = p; break;
    case 2: r = p; g = c.v; b = t; break;
    case 3: r = p; g = q; b = c.v; break;
    case 4: r = t; g = p; b = c.v; break;
    default: r = c.v; g = p; b = q; break;
  }
  auto to8 = [](double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
  };
  return {to8(r), to8(g), to8(b)};
}

// (u, v) in [0,1)^2 surface parameters -> point on the family's surface.
Vec3 SurfacePoint(int family, double u, double v) {
  const double a = 2 * pi * u;
  switch (family) {
    case 0: {  // sphere
      const double z = 2 * v - 1, r = std::sqrt(1 - z * z);
      return {r * std::cos(a), r * std::sin(a), z};
    }
    case 1: {  // torus
      const double b = 2 * pi * v;
      return {(1 + 0.4 * std::cos(b)) * std::cos(a),
              (1 + 0.4 * std::cos(b)) * std::sin(a), 0.4 * std::sin(b)};
    }
    case 2: {  // cube surface
      const int face = std::min(5, static_cast<int>(u * 6));
      const double s = u * 6 - face, t = v;
      const double x = 2 * s - 1, y = 2 * t - 1, sign = face % 2 ? -1.0 : 1.0;
      if (face < 2) return {sign, x, y};
      if (face < 4) return {x, sign, y};
      return {x, y, sign};
    }
    case 3: {  // open cylinder
      return {std::cos(a), std::sin(a), 2 * v - 1};
    }
    case 4: {  // saddle height field
      const double x = 2 * u - 1, y = 2 * v - 1;
      return {x, y, 0.6 * (x * x - y * y)};
    }
    case 5: {  // wave height field
      const double x = 2 * u - 1, y = 2 * v - 1;
      return {x, y, 0.25 * std::sin(3 * pi * x) * std::cos(2 * pi * y)};
    }
    case 6: {  // ellipsoid
      const double z = 2 * v - 1, r = std::sqrt(1 - z * z);
      return {1.0 * r * std::cos(a), 0.7 * r * std::sin(a), 0.5 * z};
    }
    default: {  // cone
      return {(1 - v) * std::cos(a), (1 - v) * std::sin(a), 1.4 * v};
    }
  }
}

Rgb SurfaceColor(int family, double u, double v, double hue0) {
  switch (family % 4) {
    case 0: {  // checker
      const bool on = (static_cast<int>(u * 8) + static_cast<int>(v * 6)) % 2 == 0;
      return HsvToRgb({hue0 + (on ? 0.0 : 0.5), 0.7, on ? 0.9 : 0.5});
    }
    case 1:  // stripes
      return HsvToRgb({hue0 + 0.15 * std::sin(10 * pi * u), 0.6,
                       0.55 + 0.35 * std::sin(12 * pi * v)});
    case 2:  // smooth gradient
      return HsvToRgb({hue0 + 0.4 * u, 0.5 + 0.4 * v, 0.8});
    default:  // rings
      return HsvToRgb({hue0, 0.8,
                       0.5 + 0.4 * std::cos(16 * pi * std::hypot(u - 0.5, v - 0.5))});
  }
}

}  // namespace

PointCloud MakeReferenceCloud(int reference_id, int points, std::uint64_t seed) {
  if (points < 8) Fail(ErrorCode::kInvalidArgument, "reference needs >= 8 points");
  const int family = reference_id % 8;
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (reference_id + 1)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double hue0 = unit(rng);
  // Texture families are shifted so shape and texture vary independently.
  const int texture = (reference_id * 3 + reference_id / 8) % 4;

  PointCloud cloud;
  cloud.positions.reserve(points);
  cloud.colors.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double u = unit(rng), v = unit(rng);
    cloud.positions.push_back(SurfacePoint(family, u, v));
    cloud.colors.push_back(SurfaceColor(texture, u, v, hue0));
  }
  return NormalizeToUnitCube(cloud);
}

std::vector<CorpusSample> GenerateCorpus(const CorpusOptions& options) {
  if (options.references < 1) {
    Fail(ErrorCode::kInvalidArgument, "corpus needs at least one reference");
  }
  std::vector<CorpusSample> samples;
  int sample_id = 0;
  for (int ref = 0; ref < options.references; ++ref) {
    const PointCloud reference =
        MakeReferenceCloud(ref, options.points_per_reference, options.seed);
    for (DistortionKind kind : kAllDistortionKinds) {
      for (int level = kMinDistortionLevel; level <= kMaxDistortionLevel; ++level) {
        CorpusSample s;
        s.sample_id = sample_id;
        s.reference_id = ref;
        s.kind = kind;
        s.level = level;
        const OracleRating rating = OracleOsd(kind, level, options.scale);
        s.true_score = rating.true_score;
        s.osd_label = rating.osd;
        s.cloud = ApplyDistortion(reference, kind, level,
                                  options.seed ^ static_cast<std::uint64_t>(sample_id));
        samples.push_back(std::move(s));
        ++sample_id;
      }
    }
  }
  return samples;
}

std::string ManifestCsv(const std::vector<CorpusSample>& samples) {
  std::string out = "sample_id,reference_id,kind,level,true_score";
  const std::size_t l = samples.empty() ? 0 : samples.front().osd_label.size();
  for (std::size_t i = 1; i <= l; ++i) out += ",p" + std::to_string(i);
  out += ",ply_path\n";
  for (const CorpusSample& s : samples) {
    out += std::to_string(s.sample_id) + ',' + std::to_string(s.reference_id) + ',' +
           std::string(DistortionKindName(s.kind)) + ',' + std::to_string(s.level) +
           ',' + FormatDouble(s.true_score);
    for (double p : s.osd_label.probs) out += ',' + FormatDouble(p);
    out += ',' + s.ply_path + '\n';
  }
  return out;
}

void WriteCorpus(const std::filesystem::path& dir, std::vector<CorpusSample>& samples) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "ply", ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + (dir / "ply").string());
  for (CorpusSample& s : samples) {
    char name[32];
    std::snprintf(name, sizeof(name), "ply/sample_%04d.ply", s.sample_id);
    s.ply_path = name;
    WritePlyFile(dir / s.ply_path, s.cloud, PlyFormat::kBinaryLittleEndian);
  }
  WriteFileBytes(dir / "manifest.csv", ManifestCsv(samples));
}

namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ToDouble(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    Fail(ErrorCode::kInvalidArgument, "manifest: bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<CorpusSample> LoadCorpus(const std::filesystem::path& dir,
                                     const ScoreScale& scale) {
  std::istringstream in(ReadFileBytes(dir / "manifest.csv"));
  const std::vector<double> options = scale.Options();
  const std::size_t expected = 6 + options.size();
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kIo, "empty manifest");
  if (SplitCsv(line).size() != expected) {
    Fail(ErrorCode::kLengthMismatch,
         "manifest header does not match the configured score options");
  }
  std::vector<CorpusSample> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != expected) Fail(ErrorCode::kLengthMismatch, "manifest row: " + line);
    CorpusSample s;
    s.sample_id = static_cast<int>(ToDouble(f[0]));
    s.reference_id = static_cast<int>(ToDouble(f[1]));
    const auto kind = ParseDistortionKind(f[2]);
    if (!kind) Fail(ErrorCode::kInvalidArgument, "manifest: unknown kind " + f[2]);
    s.kind = *kind;
    s.level = static_cast<int>(ToDouble(f[3]));
    s.true_score = ToDouble(f[4]);
    s.osd_label.anchors = options;
    for (std::size_t i = 0; i < options.size(); ++i) {
      s.osd_label.probs.push_back(ToDouble(f[5 + i]));
    }
    s.osd_label.Validate(1e-9);
    s.ply_path = f.back();
    s.cloud = ReadPlyFile(dir / s.ply_path);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace pcqa
