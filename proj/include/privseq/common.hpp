// Copyright 2026 The privseq Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace privseq {

enum class ErrorCode {
  kAllZero,
  kNegativeWeight,
  kFeatureOutOfRange,
  kEmptyBlock,
  kDeltaRequired,
  kDimensionMismatch,
  kIndexOutOfRange,
  kHorizonTooShort,
  kEmptyList,
  kConfigInvalid,
  kSchemaMismatch,
  kInvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception. `code()` identifies the failure class so callers
/// (and the CLI) can produce machine-parsable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace privseq
