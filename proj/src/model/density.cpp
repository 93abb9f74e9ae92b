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

#include "cfre/model/density.hpp"

#include <cmath>

#include "cfre/errors.hpp"
#include "cfre/flow/density.hpp"
#include "cfre/model/losses.hpp"

namespace cfre::model {

ad::Array joint_log_density(const ad::Array& mu, const ad::Array& sigma, const ad::Array& x, std::size_t K,
                            std::size_t D, const flow::VectorField& flow, const flow::FlowConfig& cfg,
                            const flow::OdeConfig& ode, Rng& rng) {
  if (x.rank() != 2 || x.cols() != K * D) throw InvalidArgument("joint_log_density: x must be [B x K*D]");
  if (flow.dim() != D) throw InvalidArgument("joint_log_density: flow dimension must equal D");
  if (!x.all_finite()) throw InvalidArgument("joint_log_density: non-finite x");
  const std::size_t B = x.rows();
  const ad::Array x_bar = standardize(x, mu, sigma);
  // Row-major [B x K*D] is already [B*K x D] row by row.
  const flow::DensityResult r = flow::log_density(flow, ad::Array({B * K, D}, x_bar.to_vector()), cfg, ode, rng);
  std::vector<double> out(B, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t k = 0; k < K; ++k) out[b] += r.log_prob.at(b * K + k, 0);
    for (std::size_t j = 0; j < K * D; ++j) out[b] -= std::log(sigma.at(b, j));
  }
  return ad::Array({B, 1}, std::move(out));
}

ad::Array joint_log_density(const RegressionModel& model, const flow::VectorField& flow, const ad::Array& input,
                            const ad::Array& x, const flow::FlowConfig& cfg, const flow::OdeConfig& ode, Rng& rng) {
  const PredictResult p = predict(model, input);
  return joint_log_density(p.mu, p.sigma, x, model.K(), model.D(), flow, cfg, ode, rng);
}

ad::Array base_log_density(BaseKind kind, const ad::Array& mu, const ad::Array& sigma, const ad::Array& x) {
  ad::NoGradGuard no_grad;
  const ad::Var terms = base_terms(kind, ad::constant(mu), ad::constant(sigma), ad::constant(x));
  const ad::Array per_sample = ad::sum(terms, 1).value();
  std::vector<double> out(per_sample.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -per_sample[i];
  return ad::Array(per_sample.shape(), std::move(out));
}

}  // namespace cfre::model
