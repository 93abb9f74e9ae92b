// Copyright 2026 The CFRE Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfre {

// Caller passed something the contract rejects (shape mismatch, bad axis,
// sigma <= 0, unknown enum name, ...). The CLI maps this to exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Value outside an operation's mathematical domain, e.g. log(0).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::size_t index)
      : std::domain_error(what + " (at flat index " + std::to_string(index) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// NaN/Inf appeared during a numeric procedure. The CLI maps this to exit code 2.
class NumericInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target field denominator vanished (sigma_min = 0 at t = 1).
class SingularityError : public NumericInstability {
 public:
  using NumericInstability::NumericInstability;
};

}  // namespace cfre
