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

#include "cfre/flow/field.hpp"

#include "cfre/errors.hpp"

namespace cfre::flow {

ad::Var VectorField::operator()(const ad::Var& z, double t) const {
  return evaluate(z, ad::constant(ad::Array::full({z.shape()[0], 1}, t)));
}

FunctionField zero_field(std::size_t dim) {
  return FunctionField(dim, [](const ad::Var& z, const ad::Var&) { return ad::constant(ad::Array::zeros(z.shape())); });
}

FunctionField affine_field(const ad::Array& A, const ad::Array& b) {
  const std::size_t n = A.rows();
  if (A.cols() != n || b.shape() != ad::Shape{1, n}) throw InvalidArgument("affine_field: need A [n x n], b [1 x n]");
  return FunctionField(n, [A, b](const ad::Var& z, const ad::Var&) {
    const std::size_t rows = z.shape()[0];
    return ad::matmul(z, ad::transpose(ad::constant(A))) + ad::expand(ad::constant(b), {rows, b.cols()});
  });
}

VectorFieldNet::VectorFieldNet(std::vector<std::size_t> widths, Rng& rng) : mlp_(std::move(widths), rng) {
  check_widths();
}

VectorFieldNet::VectorFieldNet(std::vector<std::size_t> widths, std::vector<ad::Array> params)
    : mlp_(std::move(widths), std::move(params)) {
  check_widths();
}

void VectorFieldNet::check_widths() const {
  const auto& w = mlp_.widths();
  if (w.front() != w.back() + 1) {
    throw InvalidArgument("VectorFieldNet: input width must be data_dim + 1 (time column)");
  }
}

ad::Var VectorFieldNet::evaluate(const ad::Var& z, const ad::Var& t) const {
  if (z.shape().size() != 2 || z.shape()[1] != dim()) {
    throw InvalidArgument("VectorFieldNet: state " + ad::shape_string(z.shape()) + " does not match dim " +
                          std::to_string(dim()));
  }
  if (t.shape() != ad::Shape{z.shape()[0], 1}) throw InvalidArgument("VectorFieldNet: time must be a [B x 1] column");
  const ad::Var parts[] = {z, t};
  return mlp_.forward(ad::concat_cols(parts));
}

}  // namespace cfre::flow
