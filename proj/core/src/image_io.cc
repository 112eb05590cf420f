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

#include "pcqa/image_io.h"

#include <charconv>

#include "pcqa/error.h"
#include "pcqa/file_util.h"
#include "pcqa/tensor_file.h"

namespace pcqa {

std::string EncodePpm(const ViewImage& view) {
  std::string out = "P6\n" + std::to_string(view.width) + " " +
                    std::to_string(view.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(view.color.data()), view.color.size());
  return out;
}

void SaveView(const ViewImage& view, const std::filesystem::path& color_path,
              const std::filesystem::path& depth_path) {
  WriteFileBytes(color_path, EncodePpm(view));
  RawTensor depth;
  depth.dims = {static_cast<std::uint32_t>(view.height),
                static_cast<std::uint32_t>(view.width)};
  depth.dtype = TensorDtype::kF32;
  depth.values.assign(view.depth.begin(), view.depth.end());
  WriteTensorFile(depth_path, depth);
}

void SaveMask(const ViewImage& view, const std::filesystem::path& mask_path) {
  RawTensor mask;
  mask.dims = {static_cast<std::uint32_t>(view.height),
               static_cast<std::uint32_t>(view.width)};
  mask.dtype = TensorDtype::kF32;
  mask.values.assign(view.mask.begin(), view.mask.end());
  WriteTensorFile(mask_path, mask);
}

namespace {

// Reads one whitespace-delimited unsigned header field of a PPM.
int PpmField(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
      ++pos;
    } else {
      break;
    }
  }
  int v = 0;
  auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), v);
  if (ec != std::errc() || v <= 0) Fail(ErrorCode::kBadMagic, "bad PPM header");
  pos = static_cast<std::size_t>(ptr - bytes.data());
  return v;
}

}  // namespace

ViewImage LoadView(const std::filesystem::path& color_path,
                   const std::filesystem::path& depth_path, int view_index) {
  const std::string ppm = ReadFileBytes(color_path);
  if (ppm.size() < 2 || ppm[0] != 'P' || ppm[1] != '6') {
    Fail(ErrorCode::kBadMagic, color_path.string() + " is not a P6 PPM");
  }
  std::size_t pos = 2;
  const int w = PpmField(ppm, pos);
  const int h = PpmField(ppm, pos);
  const int maxval = PpmField(ppm, pos);
  if (maxval != 255) Fail(ErrorCode::kBadMagic, "PPM maxval must be 255");
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (ppm.size() != pos + 3 * n) Fail(ErrorCode::kIo, "truncated PPM raster");

  const RawTensor depth = ReadTensorFile(depth_path);
  if (depth.dims.size() != 2 || depth.dims[0] != static_cast<std::uint32_t>(h) ||
      depth.dims[1] != static_cast<std::uint32_t>(w)) {
    Fail(ErrorCode::kShapeMismatch, "depth tensor does not match color size");
  }
  ViewImage view(h, w, view_index);
  std::copy(ppm.begin() + pos, ppm.end(), reinterpret_cast<char*>(view.color.data()));
  for (std::size_t i = 0; i < n; ++i) {
    view.depth[i] = static_cast<float>(depth.values[i]);
    view.mask[i] = view.depth[i] < 1.0f ? 1 : 0;
  }
  return view;
}

}  // namespace pcqa
