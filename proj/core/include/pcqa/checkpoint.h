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

#ifndef PCQA_CHECKPOINT_H_
#define PCQA_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcqa/ndarray.h"

namespace pcqa {

struct CheckpointBlock {
  std::string name;
  bool frozen = false;
  NdArray value;

  friend bool operator==(const CheckpointBlock&, const CheckpointBlock&) = default;
};

// Binary layout, little-endian:
//   "PCQC" | u16 version | u64 config hash | u32 block count |
//   per block: u32 name length | name | u8 flags (bit 0 = frozen) |
//              u8 rank | rank x u32 dims | f64 payload
struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::vector<CheckpointBlock> blocks;

  const CheckpointBlock* Find(std::string_view name) const;
  // Throws kInvalidArgument if the block is missing.
  const NdArray& Get(std::string_view name) const;
  void Put(std::string name, NdArray value, bool frozen = false);

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline constexpr std::uint16_t kCheckpointVersion = 1;

std::string EncodeCheckpoint(const Checkpoint& ckpt);
// Throws kBadMagic, kIo (truncated or unsupported version) and, when
// `expected_hash` is given and differs, kHashMismatch.
Checkpoint DecodeCheckpoint(std::string_view bytes,
                            std::optional<std::uint64_t> expected_hash = std::nullopt);

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path,
                          std::optional<std::uint64_t> expected_hash = std::nullopt);

}  // namespace pcqa

#endif  // PCQA_CHECKPOINT_H_
