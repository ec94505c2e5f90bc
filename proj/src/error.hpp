// Copyright 2026 The WACSE Lab Authors.
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

#ifndef WACSE_ERROR_HPP_
#define WACSE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace wacse {

// Every failure raised by the core carries one of these kinds. The C API maps
// them onto status codes and the CLI onto exit codes.
enum class ErrorKind {
  kRuntime,
  kNotFound,
  kConfig,
  kParse,
  kArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}
inline Error ParseError(const std::string& message) {
  return Error(ErrorKind::kParse, message);
}
inline Error ArgumentError(const std::string& message) {
  return Error(ErrorKind::kArgument, message);
}
inline Error NotFoundError(const std::string& message) {
  return Error(ErrorKind::kNotFound, message);
}
inline Error RuntimeError(const std::string& message) {
  return Error(ErrorKind::kRuntime, message);
}

}  // namespace wacse

#endif  // WACSE_ERROR_HPP_
