/*
 * Copyright 2026 The seedcomm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SEEDCOMM_ERROR_HPP_
#define SEEDCOMM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace seedcomm {

enum class ErrorCode {
  invalid_argument = 1,
  io = 2,
  parse = 3,
  numeric = 4,
  state = 5,
};

// Single exception type for the core library. The C API maps `code()` onto
// its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

}  // namespace seedcomm

#endif  // SEEDCOMM_ERROR_HPP_
