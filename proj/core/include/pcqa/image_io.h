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

#ifndef PCQA_IMAGE_IO_H_
#define PCQA_IMAGE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "pcqa/projection.h"

namespace pcqa {

// Binary PPM (P6, maxval 255) of the view's color plane.
std::string EncodePpm(const ViewImage& view);

// Stores color as P6 PPM and depth as an f32 PCQT tensor of dims (H, W).
// The mask is implied by depth < 1.
void SaveView(const ViewImage& view, const std::filesystem::path& color_path,
              const std::filesystem::path& depth_path);

// Writes the mask as an f32 PCQT tensor of 0/1 values.
void SaveMask(const ViewImage& view, const std::filesystem::path& mask_path);

// Inverse of SaveView. Throws kBadMagic for a non-P6 color file and
// kShapeMismatch when the two files disagree on size.
ViewImage LoadView(const std::filesystem::path& color_path,
                   const std::filesystem::path& depth_path, int view_index = 0);

}  // namespace pcqa

#endif  // PCQA_IMAGE_IO_H_
