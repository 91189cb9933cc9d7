// Copyright 2026 The tndpq Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TNDPQ_ERROR_H_
#define TNDPQ_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tndpq {

enum class ErrorCode {
  kSyntaxError,
  kUnknownSymbol,
  kIllFormed,
  kMixedVariables,
  kNonDeterministicValue,
  kShapeMismatch,
  kOracleTooLarge,
  kZeroDenominator,
  kSideConditionUnproved,
  kConsistencyError,
  kProvenanceMismatch,
  kUnknownCondition,
  kParseError,
  kSchemaMismatch,
  kEmptySupport,
  kInvariantViolation,
  kIncomparableSystems,
  kPreconditionFailed,
  kDerivationFailed,
  kRuleNotAllowed,
  kTheoremDoesNotApply,
  kUnsupportedTarget,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the parsers; `position` is a byte offset into the input.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error(ErrorCode::kSyntaxError,
              "at " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tndpq

#endif  // TNDPQ_ERROR_H_
