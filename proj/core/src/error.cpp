// Copyright 2026 The Hanforge Authors.
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

#include "hanforge/error.hpp"

namespace hanforge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIllegalSequence: return "IllegalSequence";
    case ErrorCode::kLengthExceeded: return "LengthExceeded";
    case ErrorCode::kBadLayerCount: return "BadLayerCount";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kNoLegalPath: return "NoLegalPath";
    case ErrorCode::kEmptyWord: return "EmptyWord";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kSpanMismatch: return "SpanMismatch";
    case ErrorCode::kUnknownPosLabel: return "UnknownPosLabel";
    case ErrorCode::kInvalidGoldTree: return "InvalidGoldTree";
    case ErrorCode::kBindingMismatch: return "BindingMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kModelNotLoaded: return "ModelNotLoaded";
    case ErrorCode::kCorpusFormatError: return "CorpusFormatError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kUnknownTag: return "UnknownTag";
    case ErrorCode::kFormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::kCorruptContainer: return "CorruptContainer";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace hanforge
