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

#ifndef PCQA_PLY_H_
#define PCQA_PLY_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "pcqa/point_cloud.h"

namespace pcqa {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

// Parses a PLY 1.0 document (ascii or binary_little_endian). The vertex
// element must carry x/y/z (float or double) and red/green/blue (uchar);
// other properties and elements are skipped.
//
// Errors: kMalformedHeader, kUnsupportedFormat (big endian or unknown),
// kCountMismatch (fewer records than declared), kBadProperty.
PointCloud ParsePly(std::string_view bytes);

// ascii writes doubles in shortest round-trip form; binary writes float64
// positions and uchar colors. Output is deterministic.
std::string WritePly(const PointCloud& cloud, PlyFormat format);

PointCloud ReadPlyFile(const std::filesystem::path& path);
void WritePlyFile(const std::filesystem::path& path, const PointCloud& cloud,
                  PlyFormat format);

}  // namespace pcqa

#endif  // PCQA_PLY_H_
