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

#include <random>
#include <vector>

#include "cfre/autodiff.hpp"

namespace cfre::nn {

// Fully connected tanh network with a linear last layer, row-batch
// convention: y = x W + b. Parameters are ordered W0, b0, W1, b1, ...
class Mlp {
 public:
  Mlp() = default;
  // LeCun-normal weights, zero biases.
  Mlp(std::vector<std::size_t> widths, std::mt19937_64& rng);
  Mlp(std::vector<std::size_t> widths, std::vector<ad::Array> params);

  ad::Var forward(const ad::Var& x) const;

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t num_layers() const { return widths_.empty() ? 0 : widths_.size() - 1; }
  std::vector<ad::Var>& parameters() { return params_; }
  const std::vector<ad::Var>& parameters() const { return params_; }
  const ad::Array& weight(std::size_t layer) const { return params_[2 * layer].value(); }
  const ad::Array& bias(std::size_t layer) const { return params_[2 * layer + 1].value(); }

  void zero_output_layer();
  bool all_finite() const;

 private:
  void check_layout() const;

  std::vector<std::size_t> widths_;
  std::vector<ad::Var> params_;
};

}  // namespace cfre::nn
