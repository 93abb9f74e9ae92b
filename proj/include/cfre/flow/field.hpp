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

#include <functional>
#include <vector>

#include "cfre/autodiff.hpp"
#include "cfre/flow/config.hpp"
#include "cfre/nn/mlp.hpp"

namespace cfre::flow {

// Time-conditioned velocity field f(z, t). z is [B x n]; t is a [B x 1]
// column so each row may sit at its own time.
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual std::size_t dim() const = 0;
  virtual ad::Var evaluate(const ad::Var& z, const ad::Var& t) const = 0;

  // All rows at the same time t.
  ad::Var operator()(const ad::Var& z, double t) const;
};

// Wraps a callable; used to inject analytic fields (zero, linear, affine,
// the OT target) wherever a network is accepted.
class FunctionField final : public VectorField {
 public:
  using Fn = std::function<ad::Var(const ad::Var& z, const ad::Var& t)>;

  FunctionField(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  std::size_t dim() const override { return dim_; }
  ad::Var evaluate(const ad::Var& z, const ad::Var& t) const override { return fn_(z, t); }

 private:
  std::size_t dim_;
  Fn fn_;
};

// f == 0: the identity flow.
FunctionField zero_field(std::size_t dim);
// f(z) = z A^T + b for a constant [n x n] matrix A and [1 x n] row b.
FunctionField affine_field(const ad::Array& A, const ad::Array& b);

// MLP over [z, t] with tanh hidden activations and a linear output layer;
// widths = {dim + 1, hidden..., dim}, time appended as a raw column.
class VectorFieldNet final : public VectorField {
 public:
  VectorFieldNet() = default;
  VectorFieldNet(std::vector<std::size_t> widths, Rng& rng);
  VectorFieldNet(std::vector<std::size_t> widths, std::vector<ad::Array> params);

  static std::vector<std::size_t> default_widths(std::size_t dim) { return {dim + 1, 64, 64, dim}; }

  std::size_t dim() const override { return mlp_.widths().back(); }
  ad::Var evaluate(const ad::Var& z, const ad::Var& t) const override;

  const std::vector<std::size_t>& widths() const { return mlp_.widths(); }
  std::vector<ad::Var>& parameters() { return mlp_.parameters(); }
  const std::vector<ad::Var>& parameters() const { return mlp_.parameters(); }
  const nn::Mlp& mlp() const { return mlp_; }

  // f == 0 exactly.
  void zero_output_layer() { mlp_.zero_output_layer(); }
  bool all_finite() const { return mlp_.all_finite(); }

 private:
  void check_widths() const;

  nn::Mlp mlp_;
};

}  // namespace cfre::flow
