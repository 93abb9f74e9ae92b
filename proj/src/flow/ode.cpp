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

#include "cfre/flow/ode.hpp"

#include "cfre/errors.hpp"

namespace cfre::flow {

ad::Array integrate_sample(const VectorField& field, const ad::Array& z0, const OdeConfig& ode) {
  ode.validate();
  if (z0.rank() != 2 || z0.cols() != field.dim()) {
    throw InvalidArgument("integrate_sample: state " + ad::shape_string(z0.shape()) + " does not match field dim");
  }
  ad::NoGradGuard no_grad;
  const double h = ode.step_size();
  ad::Var z = ad::constant(z0);
  for (int k = 0; k < ode.steps; ++k) {
    const double t = k * h;
    ad::Var k1 = field(z, t);
    ad::Var k2 = field(z + k1 * (h / 2), t + h / 2);
    ad::Var k3 = field(z + k2 * (h / 2), t + h / 2);
    ad::Var k4 = field(z + k3 * h, t + h);
    z = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6);
    if (!z.value().all_finite()) {
      throw NumericInstability("integrate_sample: non-finite state at step " + std::to_string(k));
    }
  }
  return z.value();
}

ad::Array sample_flow(const VectorField& field, std::size_t count, const OdeConfig& ode, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z0(count * field.dim());
  for (auto& v : z0) v = normal(rng);
  return integrate_sample(field, ad::Array({count, field.dim()}, std::move(z0)), ode);
}

}  // namespace cfre::flow
