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

#ifndef PCQA_PROJECTION_H_
#define PCQA_PROJECTION_H_

#include <cstdint>
#include <vector>

#include "pcqa/point_cloud.h"

namespace pcqa {

// One rendered viewpoint. Row-major; color is interleaved RGB.
// Unmasked pixels hold color (0,0,0) and depth 1; masked pixels hold the
// winning point's color and a depth in [0, 1).
struct ViewImage {
  int height = 0;
  int width = 0;
  int view_index = 0;
  std::vector<std::uint8_t> color;
  std::vector<float> depth;
  std::vector<std::uint8_t> mask;

  ViewImage() = default;
  ViewImage(int h, int w, int index);

  std::size_t pixel(int row, int col) const {
    return static_cast<std::size_t>(row) * width + col;
  }
  std::size_t MaskedCount() const;

  friend bool operator==(const ViewImage&, const ViewImage&) = default;
};

struct ViewSet {
  std::vector<ViewImage> views;
  int m_count() const { return static_cast<int>(views.size()); }
};

// Orthographic camera. Image coordinates (u, v) and depth are affine in the
// point position and land in [0,1] for points inside the unit cube.
struct ViewCamera {
  Vec3 direction;  // viewing direction; depth grows along it
  Vec3 right;      // image u axis
  Vec3 up;         // image v axis (row 0 is the top, v = 1)
  double u_half_extent = 0.5;
  double v_half_extent = 0.5;
  double depth_half_extent = 0.5;
};

// m == 6 gives the axis views +X, -X, +Y, -Y, +Z, -Z. Image axes are chosen
// so the cyclic relabeling x->y->z->x maps the +X/+Y/+Z views onto each
// other exactly (and likewise for the negative views). Other m use a
// Fibonacci-sphere lattice of directions.
std::vector<ViewCamera> MakeCameras(int m);

// ceil(max(h, w) / cbrt(n)) clamped to [1, 4].
int DefaultSplatRadius(std::size_t point_count, int h, int w);

// Splats each point as a filled disc of `splat_radius` pixels with a
// z-buffer (nearest along the viewing direction wins, ties keep the earlier
// point). Points projecting outside the image are dropped.
// Throws kEmptyCloud, kInvalidArgument (m < 1, h or w < 8, radius < 0).
ViewSet RenderViews(const PointCloud& cloud, int m, int h, int w, int splat_radius);

ViewImage RenderView(const PointCloud& cloud, const ViewCamera& camera, int h,
                     int w, int splat_radius, int view_index);

enum class CropMode { kCenter, kRandom };

// size x size window of color, depth and mask. Random mode draws the
// offset from `seed`. Throws kSizeTooLarge.
ViewImage CropPatch(const ViewImage& view, int size, CropMode mode,
                    std::uint64_t seed);

}  // namespace pcqa

#endif  // PCQA_PROJECTION_H_
