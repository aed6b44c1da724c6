// Copyright 2026 The HyDeS Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace hydes {

enum class ErrorCode {
  kNormTooSmall,
  kDimensionMismatch,
  kInvalidParam,
  kEmptyInput,
  kBatchTooSmall,
  kNoPositives,
  kImageTooSmall,
  kMissingForwardCache,
  kShapeMismatch,
  kClassMissingInTrain,
  kKTooLarge,
  kDegenerateBatch,
  kZeroMatrix,
  kLengthMismatch,
  kDegenerateVariance,
  kClassNameMismatch,
  kInvalidDistanceMatrix,
  kCenterRejectionExhausted,
  kBadMagic,
  kTruncatedPayload,
  kVersionUnsupported,
  kMalformedRecordSize,
  kNumericFailure,
  kConfigParse,
  kIoError,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. Carries a machine-checkable code next to the
/// human-readable message so tests and the CLI can branch on the cause.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hydes
