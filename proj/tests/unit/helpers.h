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

#ifndef TNDPQ_TESTS_HELPERS_H_
#define TNDPQ_TESTS_HELPERS_H_

#include <functional>
#include <optional>

#include "tndpq/error.h"

namespace tndpq::testing {

// Error code raised by `f`, or nullopt when it returns normally.
inline std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace tndpq::testing

#endif  // TNDPQ_TESTS_HELPERS_H_
