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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robon {

// Every failure raised by the library carries one of these codes. The CLI maps
// them onto process exit codes (see exit_code_for).
enum class ErrorCode {
  kTooFewSamples,
  kNonFiniteReward,
  kEmptySet,
  kIndexOutOfRange,
  kBudgetTooSmall,
  kSourceExhausted,
  kRewardFailure,
  kUnknownPrompt,
  kUnknownModel,
  kTimeout,
  kHttpError,
  kMalformedReply,
  kMissingCdf,
  kConfigError,
  kIoError,
  kDataError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Process exit codes: 0 success, 2 configuration, 3 data, 4 runtime.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

int exit_code_for(ErrorCode code);

}  // namespace robon
