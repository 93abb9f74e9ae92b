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

#include "cfre/nn/adam.hpp"

#include <cmath>

#include "cfre/errors.hpp"

namespace cfre::nn {

void Adam::step(std::vector<ad::Var*> params, const std::vector<ad::Var>& grads) {
  if (params.size() != grads.size()) throw InvalidArgument("Adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (auto* p : params) {
      m_.emplace_back(p->size(), 0.0);
      v_.emplace_back(p->size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw InvalidArgument("Adam: parameter list changed between steps");
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const ad::Array& value = params[k]->value();
    const auto g = grads[k].value().data();
    if (g.size() != value.size()) throw InvalidArgument("Adam: gradient shape mismatch");
    std::vector<double> next = value.to_vector();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < next.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      next[i] -= options_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + options_.epsilon);
    }
    *params[k] = ad::parameter(ad::Array(value.shape(), std::move(next)));
  }
}

}  // namespace cfre::nn
