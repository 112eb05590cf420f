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

#ifndef PCQA_TENSOR_FILE_H_
#define PCQA_TENSOR_FILE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pcqa {

// Raw tensor container:
//   "PCQT" | u16 version (1) | u8 rank | rank x u32 dims | payload
// Payload is little-endian f32 or f64; the element width is implied by the
// payload length (4 or 8 bytes times the element count).
enum class TensorDtype { kF32, kF64 };

struct RawTensor {
  std::vector<std::uint32_t> dims;
  TensorDtype dtype = TensorDtype::kF64;
  std::vector<double> values;  // f32 payloads are widened exactly

  std::size_t element_count() const;
};

inline constexpr std::uint16_t kTensorFileVersion = 1;

std::string EncodeTensor(const RawTensor& tensor);
// Throws kBadMagic, kIo (truncated), kLengthMismatch (payload size).
RawTensor DecodeTensor(std::string_view bytes);

void WriteTensorFile(const std::filesystem::path& path, const RawTensor& tensor);
RawTensor ReadTensorFile(const std::filesystem::path& path);

}  // namespace pcqa

#endif  // PCQA_TENSOR_FILE_H_
