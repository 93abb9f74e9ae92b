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

#include "cfre/nn/mlp.hpp"

#include <cmath>

#include "cfre/errors.hpp"

namespace cfre::nn {

Mlp::Mlp(std::vector<std::size_t> widths, std::mt19937_64& rng) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw InvalidArgument("Mlp needs at least an input and an output width");
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(static_cast<double>(in)));
    std::vector<double> w(in * out);
    for (auto& v : w) v = n(rng);
    params_.push_back(ad::parameter(ad::Array({in, out}, std::move(w))));
    params_.push_back(ad::parameter(ad::Array::zeros({1, out})));
  }
  check_layout();
}

Mlp::Mlp(std::vector<std::size_t> widths, std::vector<ad::Array> params) : widths_(std::move(widths)) {
  for (auto& p : params) params_.push_back(ad::parameter(std::move(p)));
  check_layout();
}

void Mlp::check_layout() const {
  if (widths_.size() < 2) throw InvalidArgument("Mlp needs at least an input and an output width");
  if (params_.size() != 2 * (widths_.size() - 1)) {
    throw InvalidArgument("Mlp: expected " + std::to_string(2 * (widths_.size() - 1)) + " parameter arrays, got " +
                          std::to_string(params_.size()));
  }
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (params_[2 * l].shape() != ad::Shape{widths_[l], widths_[l + 1]} ||
        params_[2 * l + 1].shape() != ad::Shape{1, widths_[l + 1]}) {
      throw InvalidArgument("Mlp: parameter shapes of layer " + std::to_string(l) + " do not match widths");
    }
  }
}

ad::Var Mlp::forward(const ad::Var& x) const {
  if (x.shape().size() != 2 || x.shape()[1] != widths_.front()) {
    throw InvalidArgument("Mlp: input " + ad::shape_string(x.shape()) + " does not match width " +
                          std::to_string(widths_.front()));
  }
  ad::Var h = x;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    h = ad::linear(h, params_[2 * l], params_[2 * l + 1]);
    if (l + 1 < num_layers()) h = ad::tanh(h);
  }
  return h;
}

void Mlp::zero_output_layer() {
  const std::size_t l = num_layers() - 1;
  params_[2 * l] = ad::parameter(ad::Array::zeros(params_[2 * l].shape()));
  params_[2 * l + 1] = ad::parameter(ad::Array::zeros(params_[2 * l + 1].shape()));
}

bool Mlp::all_finite() const {
  for (const auto& p : params_) {
    if (!p.value().all_finite()) return false;
  }
  return true;
}

}  // namespace cfre::nn
