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

#include "pcqa/projection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "pcqa/error.h"

namespace pcqa {

ViewImage::ViewImage(int h, int w, int index)
    : height(h),
      width(w),
      view_index(index),
      color(static_cast<std::size_t>(h) * w * 3, 0),
      depth(static_cast<std::size_t>(h) * w, 1.0f),
      mask(static_cast<std::size_t>(h) * w, 0) {}

std::size_t ViewImage::MaskedCount() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

namespace {

double Dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 Cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

Vec3 Normalized(const Vec3& a) {
  const double n = std::sqrt(Dot(a, a));
  return {a[0] / n, a[1] / n, a[2] / n};
}

double HalfExtent(const Vec3& axis) {
  return 0.5 * (std::abs(axis[0]) + std::abs(axis[1]) + std::abs(axis[2]));
}

ViewCamera AxisCamera(int axis, bool positive) {
  // Positive views: +X -> (u=y, v=z), +Y -> (u=z, v=x), +Z -> (u=x, v=y).
  // Negative views swap the image axes, which mirrors them as seen from the
  // opposite side.
  ViewCamera cam;
  cam.direction = {0, 0, 0};
  cam.direction[axis] = positive ? 1.0 : -1.0;
  cam.right = {0, 0, 0};
  cam.up = {0, 0, 0};
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  cam.right[positive ? a1 : a2] = 1.0;
  cam.up[positive ? a2 : a1] = 1.0;
  return cam;
}

}  // namespace

std::vector<ViewCamera> MakeCameras(int m) {
  if (m < 1) Fail(ErrorCode::kInvalidArgument, "view count must be >= 1");
  std::vector<ViewCamera> cams;
  if (m == 6) {
    for (int axis = 0; axis < 3; ++axis) {
      cams.push_back(AxisCamera(axis, true));
      cams.push_back(AxisCamera(axis, false));
    }
    return cams;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i) {
    const double z = m == 1 ? 1.0 : 1.0 - 2.0 * (i + 0.5) / m;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    ViewCamera cam;
    cam.direction = Normalized({r * std::cos(phi), r * std::sin(phi), z});
    const Vec3 world_up =
        std::abs(cam.direction[1]) < 0.99 ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
    cam.right = Normalized(Cross(world_up, cam.direction));
    cam.up = Cross(cam.direction, cam.right);
    cam.u_half_extent = HalfExtent(cam.right);
    cam.v_half_extent = HalfExtent(cam.up);
    cam.depth_half_extent = HalfExtent(cam.direction);
    cams.push_back(cam);
  }
  return cams;
}

int DefaultSplatRadius(std::size_t point_count, int h, int w) {
  if (point_count == 0) return 1;
  const double r = std::ceil(std::max(h, w) / std::cbrt(static_cast<double>(point_count)));
  return static_cast<int>(std::clamp(r, 1.0, 4.0));
}

ViewImage RenderView(const PointCloud& cloud, const ViewCamera& camera, int h,
                     int w, int splat_radius, int view_index) {
  ViewImage img(h, w, view_index);
  const float kMaxDepth = std::nextafter(1.0f, 0.0f);
  const int r = splat_radius;
  const int r2 = r * r;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 c = {cloud.positions[i][0] - 0.5, cloud.positions[i][1] - 0.5,
                    cloud.positions[i][2] - 0.5};
    const double u = Dot(c, camera.right) / (2 * camera.u_half_extent) + 0.5;
    const double v = Dot(c, camera.up) / (2 * camera.v_half_extent) + 0.5;
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) continue;
    const double d = Dot(c, camera.direction) / (2 * camera.depth_half_extent) + 0.5;
    const float depth = static_cast<float>(std::clamp(d, 0.0, static_cast<double>(kMaxDepth)));
    const int col = std::min(w - 1, static_cast<int>(u * w));
    const int row = std::min(h - 1, static_cast<int>((1.0 - v) * h));
    const Rgb& rgb = cloud.colors[i];
    for (int dr = -r; dr <= r; ++dr) {
      const int y = row + dr;
      if (y < 0 || y >= h) continue;
      for (int dc = -r; dc <= r; ++dc) {
        const int x = col + dc;
        if (x < 0 || x >= w || dr * dr + dc * dc > r2) continue;
        const std::size_t p = img.pixel(y, x);
        if (img.mask[p] && img.depth[p] <= depth) continue;
        img.mask[p] = 1;
        img.depth[p] = depth;
        img.color[3 * p] = rgb[0];
        img.color[3 * p + 1] = rgb[1];
        img.color[3 * p + 2] = rgb[2];
      }
    }
  }
  return img;
}

ViewSet RenderViews(const PointCloud& cloud, int m, int h, int w, int splat_radius) {
  if (cloud.size() == 0) Fail(ErrorCode::kEmptyCloud, "cannot render an empty cloud");
  cloud.Validate();
  if (h < 8 || w < 8) Fail(ErrorCode::kInvalidArgument, "render size must be >= 8");
  if (splat_radius < 0) Fail(ErrorCode::kInvalidArgument, "negative splat radius");
  ViewSet set;
  const auto cams = MakeCameras(m);
  set.views.reserve(cams.size());
  for (int i = 0; i < static_cast<int>(cams.size()); ++i) {
    set.views.push_back(RenderView(cloud, cams[i], h, w, splat_radius, i));
  }
  return set;
}

ViewImage CropPatch(const ViewImage& view, int size, CropMode mode,
                    std::uint64_t seed) {
  if (size < 1 || size > std::min(view.height, view.width)) {
    Fail(ErrorCode::kSizeTooLarge, "crop " + std::to_string(size) + " exceeds " +
                                       std::to_string(view.height) + "x" +
                                       std::to_string(view.width));
  }
  int top = (view.height - size) / 2;
  int left = (view.width - size) / 2;
  if (mode == CropMode::kRandom) {
    std::mt19937_64 rng(seed);
    top = std::uniform_int_distribution<int>(0, view.height - size)(rng);
    left = std::uniform_int_distribution<int>(0, view.width - size)(rng);
  }
  ViewImage out(size, size, view.view_index);
  for (int y = 0; y < size; ++y) {
    const std::size_t src = view.pixel(top + y, left);
    const std::size_t dst = out.pixel(y, 0);
    std::copy_n(view.color.begin() + 3 * src, 3 * size, out.color.begin() + 3 * dst);
    std::copy_n(view.depth.begin() + src, size, out.depth.begin() + dst);
    std::copy_n(view.mask.begin() + src, size, out.mask.begin() + dst);
  }
  return out;
}

}  // namespace pcqa
