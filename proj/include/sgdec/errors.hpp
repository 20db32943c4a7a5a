// Copyright (c) 2026, the sgdec authors.
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

#ifndef SGDEC_ERRORS_HPP_
#define SGDEC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sgdec {

// Malformed or inconsistent input: parse failures, broken references,
// dimension mismatches, invalid configuration. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during optimization (divergent or non-finite loss).
// CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sgdec

#endif  // SGDEC_ERRORS_HPP_
