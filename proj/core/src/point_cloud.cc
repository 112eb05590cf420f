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

#include "pcqa/point_cloud.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "pcqa/error.h"

namespace pcqa {

void PointCloud::Validate() const {
  if (positions.size() != colors.size()) {
    Fail(ErrorCode::kInvalidCloud,
         "positions/colors length mismatch: " +
             std::to_string(positions.size()) + " vs " +
             std::to_string(colors.size()));
  }
  if (positions.empty()) Fail(ErrorCode::kInvalidCloud, "empty point cloud");
  for (const Vec3& p : positions) {
    for (double c : p) {
      if (!std::isfinite(c)) {
        Fail(ErrorCode::kInvalidCloud, "non-finite coordinate");
      }
    }
  }
}

PointCloud NormalizeToUnitCube(const PointCloud& cloud) {
  cloud.Validate();
  Vec3 lo = cloud.positions.front();
  Vec3 hi = lo;
  for (const Vec3& p : cloud.positions) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  const double longest =
      std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});

  PointCloud out = cloud;
  if (!(longest > 0.0)) {
    for (Vec3& p : out.positions) p = {0.5, 0.5, 0.5};
    return out;
  }
  Vec3 offset;
  for (int a = 0; a < 3; ++a) {
    offset[a] = 0.5 * (1.0 - (hi[a] - lo[a]) / longest);
  }
  for (Vec3& p : out.positions) {
    for (int a = 0; a < 3; ++a) {
      p[a] = (p[a] - lo[a]) / longest + offset[a];
    }
  }
  return out;
}

std::string_view DistortionKindName(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kGeomNoise: return "geom_noise";
    case DistortionKind::kColorNoise: return "color_noise";
    case DistortionKind::kDownsample: return "downsample";
    case DistortionKind::kQuantize: return "quantize";
  }
  return "unknown";
}

std::optional<DistortionKind> ParseDistortionKind(std::string_view name) {
  for (DistortionKind kind : kAllDistortionKinds) {
    if (DistortionKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::size_t DownsampleCount(std::size_t n, int level) {
  // Integer arithmetic in per-mille avoids 1000 * 0.61 = 609.999... surprises.
  const std::size_t keep_permille = 1000 - 130 * static_cast<std::size_t>(level);
  return n * keep_permille / 1000;
}

PointCloud ApplyDistortion(const PointCloud& cloud, DistortionKind kind,
                           int level, std::uint64_t seed) {
  cloud.Validate();
  if (level < kMinDistortionLevel || level > kMaxDistortionLevel) {
    Fail(ErrorCode::kInvalidArgument,
         "distortion level out of range: " + std::to_string(level));
  }
  std::mt19937_64 rng(seed);
  PointCloud out = cloud;

  switch (kind) {
    case DistortionKind::kGeomNoise: {
      std::normal_distribution<double> noise(0.0, 0.002 * level);
      for (Vec3& p : out.positions) {
        for (double& c : p) c += noise(rng);
      }
      break;
    }
    case DistortionKind::kColorNoise: {
      std::normal_distribution<double> noise(0.0, 8.0 * level);
      for (Rgb& rgb : out.colors) {
        for (std::uint8_t& c : rgb) {
          const double v = std::round(static_cast<double>(c) + noise(rng));
          c = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
      }
      break;
    }
    case DistortionKind::kDownsample: {
      const std::size_t n = cloud.size();
      const std::size_t keep = DownsampleCount(n, level);
      if (keep < 8) {
        Fail(ErrorCode::kEmptyResult,
             "downsampling leaves " + std::to_string(keep) + " points");
      }
      // Partial Fisher-Yates picks a uniform subset; sorting keeps the
      // original point order.
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
      }
      idx.resize(keep);
      std::sort(idx.begin(), idx.end());
      out.positions.clear();
      out.colors.clear();
      out.positions.reserve(keep);
      out.colors.reserve(keep);
      for (std::size_t i : idx) {
        out.positions.push_back(cloud.positions[i]);
        out.colors.push_back(cloud.colors[i]);
      }
      break;
    }
    case DistortionKind::kQuantize: {
      const double step = 0.004 * level;
      for (Vec3& p : out.positions) {
        for (double& c : p) c = std::round(c / step) * step;
      }
      break;
    }
  }
  return out;
}

}  // namespace pcqa
