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

#include "pcqa/file_util.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "pcqa/error.h"

namespace pcqa {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kIo, "read failed: " + path.string());
  return std::move(ss).str();
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path.string());
}

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string FormatDouble(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
void AppendRaw(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

void AppendU16(std::string& out, std::uint16_t v) { AppendRaw(out, v); }
void AppendU32(std::string& out, std::uint32_t v) { AppendRaw(out, v); }
void AppendU64(std::string& out, std::uint64_t v) { AppendRaw(out, v); }
void AppendF32(std::string& out, float v) { AppendRaw(out, v); }
void AppendF64(std::string& out, double v) { AppendRaw(out, v); }

ByteReader::ByteReader(std::string_view bytes, int underflow_code)
    : bytes_(bytes), underflow_code_(underflow_code) {}

void ByteReader::Need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) {
    Fail(static_cast<ErrorCode>(underflow_code_), "unexpected end of data");
  }
}

std::string_view ByteReader::Take(std::size_t n) {
  Need(n);
  std::string_view s = bytes_.substr(pos_, n);
  pos_ += n;
  return s;
}

namespace {

template <typename T>
T ReadRaw(std::string_view s) {
  T v;
  std::memcpy(&v, s.data(), sizeof(T));
  return v;
}

}  // namespace

std::uint8_t ByteReader::U8() { return ReadRaw<std::uint8_t>(Take(1)); }
std::uint16_t ByteReader::U16() { return ReadRaw<std::uint16_t>(Take(2)); }
std::uint32_t ByteReader::U32() { return ReadRaw<std::uint32_t>(Take(4)); }
std::uint64_t ByteReader::U64() { return ReadRaw<std::uint64_t>(Take(8)); }
float ByteReader::F32() { return ReadRaw<float>(Take(4)); }
double ByteReader::F64() { return ReadRaw<double>(Take(8)); }

}  // namespace pcqa
