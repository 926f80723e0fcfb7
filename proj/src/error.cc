// Copyright 2026 The TrustSR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trustsr/error.h"

namespace trustsr {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kMissingReference: return "MissingReference";
    case ErrorCode::kEmbeddingError: return "EmbeddingError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kNetworkError: return "NetworkError";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kTimeoutError: return "TimeoutError";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNoConfidenceData: return "NoConfidenceData";
    case ErrorCode::kEmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorCode::kMissingHumanData: return "MissingHumanData";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kJoinError: return "JoinError";
    case ErrorCode::kBadSpec: return "BadSpec";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kBadSpec:
      return 2;
    case ErrorCode::kEmbeddingError:
    case ErrorCode::kNetworkError:
    case ErrorCode::kProtocolError:
    case ErrorCode::kTimeoutError:
    case ErrorCode::kProviderError:
    case ErrorCode::kParseError:
      return 4;
    case ErrorCode::kEmptyAfterFilter:
      return 5;
    default:
      return 3;
  }
}

}  // namespace trustsr
