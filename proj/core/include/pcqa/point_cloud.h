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

#ifndef PCQA_POINT_CLOUD_H_
#define PCQA_POINT_CLOUD_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace pcqa {

using Vec3 = std::array<double, 3>;
using Rgb = std::array<std::uint8_t, 3>;

// Colored point set. positions and colors are parallel arrays.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Rgb> colors;

  std::size_t size() const { return positions.size(); }

  // Throws kInvalidCloud on length mismatch, empty cloud, or a non-finite
  // coordinate.
  void Validate() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

// Maps the bounding box into [0,1]^3 with one uniform scale (longest side
// becomes 1). Every axis is centered, so shorter and degenerate axes sit in
// the middle of the cube. A cloud whose points all coincide maps to
// (0.5, 0.5, 0.5).
PointCloud NormalizeToUnitCube(const PointCloud& cloud);

enum class DistortionKind { kGeomNoise, kColorNoise, kDownsample, kQuantize };

inline constexpr std::array<DistortionKind, 4> kAllDistortionKinds = {
    DistortionKind::kGeomNoise, DistortionKind::kColorNoise,
    DistortionKind::kDownsample, DistortionKind::kQuantize};

inline constexpr int kMinDistortionLevel = 1;
inline constexpr int kMaxDistortionLevel = 6;

std::string_view DistortionKindName(DistortionKind kind);
std::optional<DistortionKind> ParseDistortionKind(std::string_view name);

// Number of points kept by kDownsample at `level`.
std::size_t DownsampleCount(std::size_t n, int level);

// Deterministic in (kind, level, seed). Severity grows with level:
//   geom_noise   Gaussian offsets, sigma = 0.002 * level per coordinate
//   color_noise  Gaussian channel noise, sigma = 8 * level, clamped
//   downsample   keeps floor(n * (1 - 0.13 * level)) points, order kept
//   quantize     snaps coordinates to a grid of step 0.004 * level
// Throws kEmptyResult if downsampling would leave fewer than 8 points.
PointCloud ApplyDistortion(const PointCloud& cloud, DistortionKind kind,
                           int level, std::uint64_t seed);

}  // namespace pcqa

#endif  // PCQA_POINT_CLOUD_H_
