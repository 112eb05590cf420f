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

#include "pcqa/error.h"

namespace pcqa {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kBadProperty: return "BadProperty";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kHashMismatch: return "HashMismatch";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInvalidCloud: return "InvalidCloud";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kSizeTooLarge: return "SizeTooLarge";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kAxisMismatch: return "AxisMismatch";
    case ErrorCode::kThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::kDegenerateBatch: return "DegenerateBatch";
    case ErrorCode::kOddContextLength: return "OddContextLength";
    case ErrorCode::kConstantInput: return "ConstantInput";
    case ErrorCode::kTooFewReferences: return "TooFewReferences";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pcqa
