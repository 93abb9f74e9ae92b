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

#include "cfre/autodiff/array.hpp"

#include <cmath>
#include <sstream>

#include "cfre/errors.hpp"

namespace cfre::ad {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Array::Array() : shape_{1}, data_{0.0} {}

Array::Array(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw InvalidArgument("Array shape must have at least one dimension");
  for (std::size_t d : shape_) {
    if (d == 0) throw InvalidArgument("Array dimensions must be positive, got " + shape_string(shape_));
  }
  if (shape_size(shape_) != data_.size()) {
    throw InvalidArgument("Array data length " + std::to_string(data_.size()) +
                          " does not match shape " + shape_string(shape_));
  }
}

Array Array::scalar(double value) { return Array({1}, {value}); }

Array Array::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Array Array::full(Shape shape, double value) {
  const std::size_t n = shape_size(shape);
  return Array(std::move(shape), std::vector<double>(n, value));
}

Array Array::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  if (rows.size() == 0) throw InvalidArgument("matrix literal needs at least one row");
  const std::size_t cols = rows.begin()->size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw InvalidArgument("ragged matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Array({rows.size(), cols}, std::move(data));
}

Array Array::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Array({n, 1}, std::move(values));
}

Array Array::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Array({1, n}, std::move(values));
}

std::size_t Array::rows() const {
  if (rank() != 2) throw InvalidArgument("rows() needs a 2-D array, got " + shape_string(shape_));
  return shape_[0];
}

std::size_t Array::cols() const {
  if (rank() != 2) throw InvalidArgument("cols() needs a 2-D array, got " + shape_string(shape_));
  return shape_[1];
}

double Array::at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

double Array::item() const {
  if (!is_scalar()) throw InvalidArgument("item() on non-scalar array " + shape_string(shape_));
  return data_[0];
}

bool Array::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace cfre::ad
