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

#ifndef PCQA_ERROR_H_
#define PCQA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcqa {

enum class ErrorCode {
  // Ingestion / file formats.
  kMalformedHeader,
  kUnsupportedFormat,
  kCountMismatch,
  kBadProperty,
  kBadMagic,
  kHashMismatch,
  kIo,
  // Geometry and rendering.
  kInvalidCloud,
  kEmptyResult,
  kEmptyCloud,
  kSizeTooLarge,
  // Numerics.
  kShapeMismatch,
  kNonFinite,
  kZeroVector,
  kLengthMismatch,
  kAxisMismatch,
  kThetaOutOfRange,
  kDegenerateBatch,
  kOddContextLength,
  kConstantInput,
  kTooFewReferences,
  kInvalidArgument,
  // Configuration.
  kConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as pcqa::Error; the code lets callers (and
// the CLI exit-code mapping) distinguish the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace pcqa

#endif  // PCQA_ERROR_H_
