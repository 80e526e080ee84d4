// Copyright 2026 The rmc Authors. All Rights Reserved.
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

#include "rmc/error.hpp"

namespace rmc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDuplicateEntry: return "DuplicateEntry";
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::kEmptyResidual: return "EmptyResidual";
    case ErrorCode::kEmptyRow: return "EmptyRow";
    case ErrorCode::kDegenerateRow: return "DegenerateRow";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kUnidentifiableRow: return "UnidentifiableRow";
    case ErrorCode::kUnidentifiableColumn: return "UnidentifiableColumn";
    case ErrorCode::kZeroDirection: return "ZeroDirection";
    case ErrorCode::kZeroCurvature: return "ZeroCurvature";
    case ErrorCode::kBadRank: return "BadRank";
    case ErrorCode::kBadFraction: return "BadFraction";
    case ErrorCode::kZeroTruth: return "ZeroTruth";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kNonRectangular: return "NonRectangular";
  }
  return "Unknown";
}

}  // namespace rmc
