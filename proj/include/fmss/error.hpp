// Copyright 2026 The fmss-warmth Authors
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
#include <utility>

namespace fmss {

// validation: bad inputs, malformed files, schema violations (CLI exit 1).
// runtime: failures while executing an otherwise valid request (CLI exit 2).
enum class ErrorKind { validation, runtime };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  static Error validation(std::string m) {
    return Error(ErrorKind::validation, std::move(m));
  }
  static Error runtime(std::string m) {
    return Error(ErrorKind::runtime, std::move(m));
  }

 private:
  ErrorKind kind_;
};

}  // namespace fmss
