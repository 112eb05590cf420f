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

#include "pcqa/tensor_file.h"

#include "pcqa/error.h"
#include "pcqa/file_util.h"

namespace pcqa {

std::size_t RawTensor::element_count() const {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

std::string EncodeTensor(const RawTensor& tensor) {
  if (tensor.dims.size() > 255) Fail(ErrorCode::kInvalidArgument, "rank > 255");
  if (tensor.values.size() != tensor.element_count()) {
    Fail(ErrorCode::kShapeMismatch, "tensor values do not match dims");
  }
  std::string out = "PCQT";
  AppendU16(out, kTensorFileVersion);
  out.push_back(static_cast<char>(tensor.dims.size()));
  for (std::uint32_t d : tensor.dims) AppendU32(out, d);
  for (double v : tensor.values) {
    if (tensor.dtype == TensorDtype::kF32) {
      AppendF32(out, static_cast<float>(v));
    } else {
      AppendF64(out, v);
    }
  }
  return out;
}

RawTensor DecodeTensor(std::string_view bytes) {
  ByteReader in(bytes, static_cast<int>(ErrorCode::kIo));
  if (bytes.size() < 4 || in.Take(4) != "PCQT") {
    Fail(ErrorCode::kBadMagic, "not a PCQT tensor file");
  }
  const std::uint16_t version = in.U16();
  if (version != kTensorFileVersion) {
    Fail(ErrorCode::kBadMagic, "unsupported PCQT version " + std::to_string(version));
  }
  RawTensor t;
  const int rank = in.U8();
  for (int i = 0; i < rank; ++i) t.dims.push_back(in.U32());
  const std::size_t n = t.element_count();
  if (in.remaining() == 4 * n) {
    t.dtype = TensorDtype::kF32;
    t.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.values.push_back(in.F32());
  } else if (in.remaining() == 8 * n) {
    t.dtype = TensorDtype::kF64;
    t.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.values.push_back(in.F64());
  } else {
    Fail(ErrorCode::kLengthMismatch,
         "payload of " + std::to_string(in.remaining()) + " bytes for " +
             std::to_string(n) + " elements");
  }
  return t;
}

void WriteTensorFile(const std::filesystem::path& path, const RawTensor& tensor) {
  WriteFileBytes(path, EncodeTensor(tensor));
}

RawTensor ReadTensorFile(const std::filesystem::path& path) {
  return DecodeTensor(ReadFileBytes(path));
}

}  // namespace pcqa
