/*
 * Copyright 2026 The memptec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memptec {

enum class ErrorCode {
  kMalformedDocument,
  kMissingName,
  kBadTimestamp,
  kNotFound,
  kNetworkUnavailable,
  kUnsupportedHost,
  kBadLabel,
  kUnknownFeature,
  kClockSkew,
  kBadBase,
  kInsufficientBenign,
  kTooSmall,
  kBadProfile,
  kSingleClassTraining,
  kNonFiniteFeature,
  kBadHyperparam,
  kCatalogMismatch,
  kLengthMismatch,
  kTooManyFeaturesForExact,
  kEmptyPool,
  kIncompleteGrouping,
  kInvalidArgument,
  kConfigInvalid,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is an Error carrying one of the codes
// above; callers that need to branch on the failure kind inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kMissingName: return "MissingName";
    case ErrorCode::kBadTimestamp: return "BadTimestamp";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNetworkUnavailable: return "NetworkUnavailable";
    case ErrorCode::kUnsupportedHost: return "UnsupportedHost";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kUnknownFeature: return "UnknownFeature";
    case ErrorCode::kClockSkew: return "ClockSkew";
    case ErrorCode::kBadBase: return "BadBase";
    case ErrorCode::kInsufficientBenign: return "InsufficientBenign";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kBadProfile: return "BadProfile";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kNonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::kBadHyperparam: return "BadHyperparam";
    case ErrorCode::kCatalogMismatch: return "CatalogMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooManyFeaturesForExact: return "TooManyFeaturesForExact";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kIncompleteGrouping: return "IncompleteGrouping";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace memptec
