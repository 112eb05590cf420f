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

#ifndef PCQA_FILE_UTIL_H_
#define PCQA_FILE_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pcqa {

// Whole-file helpers; failures throw pcqa::Error with kIo.
std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

// 64-bit FNV-1a; stable across platforms (used for config and weight hashes).
std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);

// Little-endian scalar encoding shared by the binary formats.
void AppendU16(std::string& out, std::uint16_t v);
void AppendU32(std::string& out, std::uint32_t v);
void AppendU64(std::string& out, std::uint64_t v);
void AppendF32(std::string& out, float v);
void AppendF64(std::string& out, double v);

// Bounds-checked little-endian reader over a byte buffer. Reading past the
// end throws `underflow_code`.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, int underflow_code);

  std::uint8_t U8();
  std::uint16_t U16();
  std::uint32_t U32();
  std::uint64_t U64();
  float F32();
  double F64();
  std::string_view Take(std::size_t n);

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void Need(std::size_t n) const;

  std::string_view bytes_;
  std::size_t pos_ = 0;
  int underflow_code_;
};

}  // namespace pcqa

#endif  // PCQA_FILE_UTIL_H_
