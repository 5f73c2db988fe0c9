// Copyright 2026 The robon Authors
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

#include "robon/errors.hpp"

namespace robon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kNonFiniteReward: return "NonFiniteReward";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kBudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::kSourceExhausted: return "SourceExhausted";
    case ErrorCode::kRewardFailure: return "RewardFailure";
    case ErrorCode::kUnknownPrompt: return "UnknownPrompt";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kHttpError: return "HttpError";
    case ErrorCode::kMalformedReply: return "MalformedReply";
    case ErrorCode::kMissingCdf: return "MissingCdf";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDataError: return "DataError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kBudgetTooSmall:
      return kExitConfig;
    case ErrorCode::kTooFewSamples:
    case ErrorCode::kNonFiniteReward:
    case ErrorCode::kUnknownPrompt:
    case ErrorCode::kUnknownModel:
    case ErrorCode::kMissingCdf:
    case ErrorCode::kIoError:
    case ErrorCode::kDataError:
    case ErrorCode::kSourceExhausted:
      return kExitData;
    default:
      return kExitRuntime;
  }
}

}  // namespace robon
