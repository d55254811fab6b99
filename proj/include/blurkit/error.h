// Copyright 2026 The Blurkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BLURKIT_ERROR_H_
#define BLURKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace blurkit {

// Base class for all errors raised by the library. Callers that only need
// to distinguish library failures from everything else catch this.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (bad JSON, dangling ids, bad files).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace blurkit

#endif  // BLURKIT_ERROR_H_
