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

#include "cfre/flow/ot.hpp"

#include <cmath>

#include "cfre/errors.hpp"

namespace cfre::flow {

ad::Array ot_path(const ad::Array& z0, const ad::Array& z1, double t, double sigma_min) {
  if (z0.shape() != z1.shape()) throw InvalidArgument("ot_path: z0 and z1 shapes differ");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("ot_path: t must lie in [0, 1]");
  const double a = 1.0 - (1.0 - sigma_min) * t;
  std::vector<double> out(z0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * z0[i] + t * z1[i];
  return ad::Array(z0.shape(), std::move(out));
}

ad::Array ot_target_field(const ad::Array& z_t, const ad::Array& z1, double t, double sigma_min) {
  if (z_t.shape() != z1.shape()) throw InvalidArgument("ot_target_field: z_t and z1 shapes differ");
  const double denom = 1.0 - (1.0 - sigma_min) * t;
  if (denom <= 1e-12) throw SingularityError("ot_target_field: denominator vanishes (sigma_min = 0 at t = 1)");
  const double k = 1.0 - sigma_min;
  std::vector<double> out(z_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (z1[i] - k * z_t[i]) / denom;
  return ad::Array(z_t.shape(), std::move(out));
}

PathSample sample_path(const ad::Array& x_bar, double sigma_min, Rng& rng) {
  if (x_bar.rank() != 2 || x_bar.rows() == 0) throw InvalidArgument("flow matching: need a non-empty [B x n] batch");
  if (!x_bar.all_finite()) throw InvalidArgument("flow matching: non-finite data");
  const std::size_t rows = x_bar.rows(), n = x_bar.cols();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> t(rows), z0(rows * n), zt(rows * n), u(rows * n);
  const double k = 1.0 - sigma_min;
  for (std::size_t r = 0; r < rows; ++r) {
    t[r] = uniform(rng);
    for (std::size_t j = 0; j < n; ++j) z0[r * n + j] = normal(rng);
    const double a = 1.0 - k * t[r];
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = r * n + j;
      zt[i] = a * z0[i] + t[r] * x_bar[i];
      u[i] = x_bar[i] - k * z0[i];
    }
  }
  return PathSample{ad::Array({rows, n}, std::move(z0)), x_bar, ad::Array({rows, 1}, std::move(t)),
                    ad::Array({rows, n}, std::move(zt)), ad::Array({rows, n}, std::move(u))};
}

ad::Var flow_matching_terms(const VectorField& field, const PathSample& sample) {
  ad::Var f = field.evaluate(ad::constant(sample.z_t), ad::constant(sample.t));
  return ad::sum(ad::square(f - ad::constant(sample.u_t)), 1);
}

ad::Var flow_matching_loss(const VectorField& field, const ad::Array& x_bar, const FlowConfig& cfg, Rng& rng) {
  cfg.validate();
  return ad::mean(flow_matching_terms(field, sample_path(x_bar, cfg.sigma_min, rng)));
}

}  // namespace cfre::flow
