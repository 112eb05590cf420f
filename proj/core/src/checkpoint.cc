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

#include "pcqa/checkpoint.h"

#include <cstring>

#include "pcqa/error.h"
#include "pcqa/file_util.h"

namespace pcqa {

namespace {
constexpr char kMagic[4] = {'P', 'C', 'Q', 'C'};
}

const CheckpointBlock* Checkpoint::Find(std::string_view name) const {
  for (const CheckpointBlock& b : blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const NdArray& Checkpoint::Get(std::string_view name) const {
  const CheckpointBlock* b = Find(name);
  if (b == nullptr) {
    Fail(ErrorCode::kInvalidArgument, "checkpoint has no block '" + std::string(name) + "'");
  }
  return b->value;
}

void Checkpoint::Put(std::string name, NdArray value, bool frozen) {
  for (CheckpointBlock& b : blocks) {
    if (b.name == name) {
      b.value = std::move(value);
      b.frozen = frozen;
      return;
    }
  }
  blocks.push_back({std::move(name), frozen, std::move(value)});
}

std::string EncodeCheckpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, 4);
  AppendU16(out, kCheckpointVersion);
  AppendU64(out, ckpt.config_hash);
  AppendU32(out, static_cast<std::uint32_t>(ckpt.blocks.size()));
  for (const CheckpointBlock& b : ckpt.blocks) {
    AppendU32(out, static_cast<std::uint32_t>(b.name.size()));
    out += b.name;
    out.push_back(static_cast<char>(b.frozen ? 1 : 0));
    out.push_back(static_cast<char>(b.value.rank()));
    for (std::size_t d : b.value.shape()) AppendU32(out, static_cast<std::uint32_t>(d));
    for (double v : b.value.values()) AppendF64(out, v);
  }
  return out;
}

Checkpoint DecodeCheckpoint(std::string_view bytes,
                            std::optional<std::uint64_t> expected_hash) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    Fail(ErrorCode::kBadMagic, "not a PCQC checkpoint");
  }
  ByteReader r(bytes.substr(4), static_cast<int>(ErrorCode::kIo));
  const std::uint16_t version = r.U16();
  if (version != kCheckpointVersion) {
    Fail(ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.config_hash = r.U64();
  if (expected_hash && *expected_hash != ckpt.config_hash) {
    Fail(ErrorCode::kHashMismatch, "checkpoint was written for a different configuration");
  }
  const std::uint32_t count = r.U32();
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointBlock b;
    b.name = std::string(r.Take(r.U32()));
    const std::uint8_t flags = r.U8();
    b.frozen = (flags & 1) != 0;
    const std::uint8_t rank = r.U8();
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (std::size_t& d : shape) {
      d = r.U32();
      n *= d;
    }
    if (n * 8 > r.remaining()) Fail(ErrorCode::kIo, "checkpoint block '" + b.name + "' truncated");
    std::vector<double> data(n);
    for (double& v : data) v = r.F64();
    b.value = NdArray(std::move(shape), std::move(data));
    ckpt.blocks.push_back(std::move(b));
  }
  if (r.remaining() != 0) Fail(ErrorCode::kIo, "trailing bytes after checkpoint");
  return ckpt;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  WriteFileBytes(path, EncodeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          std::optional<std::uint64_t> expected_hash) {
  return DecodeCheckpoint(ReadFileBytes(path), expected_hash);
}

}  // namespace pcqa
