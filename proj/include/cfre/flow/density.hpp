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

#include <string>
#include <vector>

#include "cfre/autodiff.hpp"
#include "cfre/flow/config.hpp"
#include "cfre/flow/field.hpp"

namespace cfre::flow {

// log N(z; 0, I) per row, [B x 1].
ad::Var standard_normal_log_prob(const ad::Var& z);

// Per-row results for a batch of data points.
struct DensityResult {
  ad::Array log_prob;        // [B x 1]
  ad::Array z0_terminal;     // [B x n], state reached at t = 0
  ad::Array trace_integral;  // [B x 1], integral over [0,1] of tr(df/dz)
};

struct DensityGraph {
  ad::Var log_prob;
  ad::Var z0_terminal;
  ad::Var trace_integral;
};

// Integrates the augmented state (z, trace accumulator) from t = 1 (z = x_bar)
// back to t = 0 on the RK4 grid. log p(x_bar) = log N(z(0)) - integral.
// Hutchinson probes are drawn once per call and reused at every stage.
// With create_graph the result is differentiable end to end (field
// parameters and x_bar); otherwise only one stage is alive at a time.
DensityGraph log_density_graph(const VectorField& field, const ad::Var& x_bar, const FlowConfig& cfg,
                               const OdeConfig& ode, Rng& rng, bool create_graph);

// Evaluation entry point; processes rows in chunks.
DensityResult log_density(const VectorField& field, const ad::Array& x_bar, const FlowConfig& cfg,
                          const OdeConfig& ode, Rng& rng);

// Per-row negative log-likelihood of x under the reparameterized model
//   sum(log sigma_hat) - log N(z(0)) + integral tr(df/dz),
// with x_bar = (x - mu_hat) / sigma_hat. Differentiable in the field, mu_hat
// and sigma_hat. Throws InvalidArgument if any sigma_hat <= 0.
ad::Var explicit_nll_terms(const VectorField& field, const ad::Var& mu_hat, const ad::Var& sigma_hat,
                           const ad::Array& x, const FlowConfig& cfg, const OdeConfig& ode, Rng& rng);

ad::Var explicit_nll_loss(const VectorField& field, const ad::Var& mu_hat, const ad::Var& sigma_hat,
                          const ad::Array& x, const FlowConfig& cfg, const OdeConfig& ode, Rng& rng);

// Regular 2-D grid of log densities, rows ordered with x varying fastest.
struct DensityGrid {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> log_prob;
  double spacing_x = 0.0;
  double spacing_y = 0.0;

  // Riemann sum of exp(log_prob) times the cell area.
  double integral() const;
};

// Grid of `steps` points per axis spanning [lo, hi] in both axes.
std::vector<double> grid_axis(double lo, double hi, int steps);

// Density of the flow itself over x_bar space (data_dim must be 2).
DensityGrid flow_density_grid(const VectorField& field, const FlowConfig& cfg, const OdeConfig& ode, Rng& rng,
                              double lo, double hi, int steps);

// CSV with header `x,y,log_prob,prob`.
void write_density_grid_csv(const DensityGrid& grid, const std::string& path);

}  // namespace cfre::flow
