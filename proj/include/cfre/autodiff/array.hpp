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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace cfre::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major block of doubles. Immutable once constructed; every
// operation returns a new Array.
class Array {
 public:
  // Scalar zero with shape {1}.
  Array();
  Array(Shape shape, std::vector<double> data);

  static Array scalar(double value);
  static Array zeros(Shape shape);
  static Array full(Shape shape, double value);
  // 2-D array from nested rows; all rows must have equal length.
  static Array matrix(std::initializer_list<std::initializer_list<double>> rows);
  // Column vector [n x 1].
  static Array column(std::vector<double> values);
  // Row vector [1 x n].
  static Array row(std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_scalar() const noexcept { return data_.size() == 1; }

  // 2-D accessors; throw InvalidArgument on other ranks.
  std::size_t rows() const;
  std::size_t cols() const;
  double at(std::size_t r, std::size_t c) const;

  double operator[](std::size_t i) const { return data_[i]; }
  double item() const;
  std::span<const double> data() const noexcept { return data_; }
  // Copy of the buffer, for building a modified array.
  std::vector<double> to_vector() const { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Array& a, const Array& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace cfre::ad
