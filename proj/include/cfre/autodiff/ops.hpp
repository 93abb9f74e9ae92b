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
#include <optional>
#include <span>

#include "cfre/autodiff/var.hpp"

namespace cfre::ad {

// Binary elementwise ops accept equal shapes, or a size-1 operand against any
// shape. Nothing else broadcasts implicitly; use expand() / repeat_rows().

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
// Throws DomainError if any divisor is zero.
Var div(const Var& a, const Var& b);

Var neg(const Var& x);
Var exp(const Var& x);
// Throws DomainError on non-positive input.
Var log(const Var& x);
// Subgradient 0 at 0.
Var abs(const Var& x);
Var tanh(const Var& x);
Var square(const Var& x);
Var sigmoid(const Var& x);
Var softplus(const Var& x);

enum class ElementwiseOp { add, sub, mul, div, exp, log, abs, tanh, square, sigmoid, softplus };

// Name-dispatched form of the functions above; operand count must match the op's arity.
Var elementwise(ElementwiseOp op, std::span<const Var> operands);

// [m x k] * [k x n]
Var matmul(const Var& a, const Var& b);
// x W + b for x [B x k], W [k x m] and a bias row b [1 x m].
Var linear(const Var& x, const Var& W, const Var& b);
Var transpose(const Var& x);

// Reductions keep the reduced axis with length 1. Without an axis the result
// has shape {1}.
Var sum(const Var& x, std::optional<std::size_t> axis = std::nullopt);
Var mean(const Var& x, std::optional<std::size_t> axis = std::nullopt);

// Explicit broadcast: every dim of x equals the target dim or is 1 (a size-1
// x may expand to any shape).
Var expand(const Var& x, const Shape& shape);
// Reverse of expand: sums over the axes where `shape` has length 1.
Var sum_to(const Var& x, const Shape& shape);
// Stacks `times` copies of a 2-D x vertically.
Var repeat_rows(const Var& x, std::size_t times);
Var reshape(const Var& x, const Shape& shape);

// Column range [begin, end) of a 2-D x.
Var slice_cols(const Var& x, std::size_t begin, std::size_t end);
// Places x at column `offset` of a zero matrix with `total_cols` columns.
Var pad_cols(const Var& x, std::size_t offset, std::size_t total_cols);
Var concat_cols(std::span<const Var> parts);

// Same value, cut from the graph.
Var detach(const Var& x);

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& x);
Var operator+(const Var& a, double b);
Var operator+(double a, const Var& b);
Var operator-(const Var& a, double b);
Var operator-(double a, const Var& b);
Var operator*(const Var& a, double b);
Var operator*(double a, const Var& b);
Var operator/(const Var& a, double b);

}  // namespace cfre::ad
