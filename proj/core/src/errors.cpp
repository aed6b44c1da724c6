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

#include "hydes/errors.hpp"

namespace hydes {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNormTooSmall: return "NormTooSmall";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidParam: return "InvalidParam";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBatchTooSmall: return "BatchTooSmall";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kMissingForwardCache: return "MissingForwardCache";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kClassMissingInTrain: return "ClassMissingInTrain";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kDegenerateBatch: return "DegenerateBatch";
    case ErrorCode::kZeroMatrix: return "ZeroMatrix";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kClassNameMismatch: return "ClassNameMismatch";
    case ErrorCode::kInvalidDistanceMatrix: return "InvalidDistanceMatrix";
    case ErrorCode::kCenterRejectionExhausted: return "CenterRejectionExhausted";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kMalformedRecordSize: return "MalformedRecordSize";
    case ErrorCode::kNumericFailure: return "NumericFailure";
    case ErrorCode::kConfigParse: return "ConfigParse";
    case ErrorCode::kIoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace hydes
