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

#include "cfre/flow/density.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "cfre/errors.hpp"
#include "cfre/flow/trace.hpp"

namespace cfre::flow {

namespace {

constexpr std::size_t kChunkRows = 4096;

FieldWithTrace dynamics(const VectorField& field, const ad::Var& z, double t, const FlowConfig& cfg,
                        const ad::Array& probes, bool create_graph) {
  const ad::Var tc = ad::constant(ad::Array::full({z.shape()[0], 1}, t));
  if (cfg.trace_mode == TraceMode::exact) return field_and_exact_trace(field, z, tc, create_graph);
  return field_and_probe_trace(field, z, tc, probes, create_graph);
}

}  // namespace

ad::Var standard_normal_log_prob(const ad::Var& z) {
  const double n = static_cast<double>(z.shape()[1]);
  return ad::sum(ad::square(z), 1) * -0.5 - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

DensityGraph log_density_graph(const VectorField& field, const ad::Var& x_bar, const FlowConfig& cfg,
                               const OdeConfig& ode, Rng& rng, bool create_graph) {
  cfg.validate();
  ode.validate();
  if (x_bar.shape().size() != 2 || x_bar.shape()[1] != field.dim()) {
    throw InvalidArgument("log_density: data " + ad::shape_string(x_bar.shape()) + " does not match field dim");
  }
  if (!x_bar.value().all_finite()) throw InvalidArgument("log_density: non-finite data");
  const std::size_t rows = x_bar.shape()[0];
  ad::Array probes;
  if (cfg.trace_mode == TraceMode::hutchinson) {
    probes = draw_probes(rows * static_cast<std::size_t>(cfg.hutchinson_probes), field.dim(), cfg.probe_law, rng);
  }

  const double h = ode.step_size();
  ad::Var z = create_graph ? x_bar : ad::detach(x_bar);
  ad::Var integral = ad::constant(ad::Array::zeros({rows, 1}));
  for (int k = 0; k < ode.steps; ++k) {
    const double t = 1.0 - k * h;
    FieldWithTrace s1 = dynamics(field, z, t, cfg, probes, create_graph);
    FieldWithTrace s2 = dynamics(field, z - s1.value * (h / 2), t - h / 2, cfg, probes, create_graph);
    FieldWithTrace s3 = dynamics(field, z - s2.value * (h / 2), t - h / 2, cfg, probes, create_graph);
    FieldWithTrace s4 = dynamics(field, z - s3.value * h, t - h, cfg, probes, create_graph);
    z = z - (s1.value + s2.value * 2.0 + s3.value * 2.0 + s4.value) * (h / 6);
    integral = integral + (s1.trace + s2.trace * 2.0 + s3.trace * 2.0 + s4.trace) * (h / 6);
    if (!integral.value().all_finite()) {
      throw NumericInstability("log_density: non-finite trace at step " + std::to_string(k));
    }
    if (!z.value().all_finite()) {
      throw NumericInstability("log_density: non-finite state at step " + std::to_string(k));
    }
  }
  DensityGraph out;
  out.z0_terminal = z;
  out.trace_integral = integral;
  out.log_prob = standard_normal_log_prob(z) - integral;
  return out;
}

DensityResult log_density(const VectorField& field, const ad::Array& x_bar, const FlowConfig& cfg,
                          const OdeConfig& ode, Rng& rng) {
  if (x_bar.rank() != 2 || x_bar.cols() != field.dim()) {
    throw InvalidArgument("log_density: data " + ad::shape_string(x_bar.shape()) + " does not match field dim");
  }
  const std::size_t rows = x_bar.rows(), n = x_bar.cols();
  std::vector<double> lp, z0, tr;
  lp.reserve(rows);
  z0.reserve(rows * n);
  tr.reserve(rows);
  for (std::size_t begin = 0; begin < rows; begin += kChunkRows) {
    const std::size_t end = std::min(rows, begin + kChunkRows);
    std::vector<double> chunk(x_bar.data().begin() + begin * n, x_bar.data().begin() + end * n);
    DensityGraph g = log_density_graph(field, ad::constant(ad::Array({end - begin, n}, std::move(chunk))), cfg, ode,
                                       rng, /*create_graph=*/false);
    const auto a = g.log_prob.value().data();
    lp.insert(lp.end(), a.begin(), a.end());
    const auto b = g.z0_terminal.value().data();
    z0.insert(z0.end(), b.begin(), b.end());
    const auto c = g.trace_integral.value().data();
    tr.insert(tr.end(), c.begin(), c.end());
  }
  return DensityResult{ad::Array({rows, 1}, std::move(lp)), ad::Array({rows, n}, std::move(z0)),
                       ad::Array({rows, 1}, std::move(tr))};
}

ad::Var explicit_nll_terms(const VectorField& field, const ad::Var& mu_hat, const ad::Var& sigma_hat,
                           const ad::Array& x, const FlowConfig& cfg, const OdeConfig& ode, Rng& rng) {
  if (mu_hat.shape() != x.shape() || sigma_hat.shape() != x.shape()) {
    throw InvalidArgument("explicit_nll: mu_hat, sigma_hat and x must share a shape");
  }
  const auto s = sigma_hat.value().data();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) throw InvalidArgument("explicit_nll: sigma_hat must be positive (index " + std::to_string(i) + ")");
  }
  ad::Var x_bar = (ad::constant(x) - mu_hat) / sigma_hat;
  DensityGraph g = log_density_graph(field, x_bar, cfg, ode, rng, /*create_graph=*/true);
  return ad::sum(ad::log(sigma_hat), 1) - g.log_prob;
}

ad::Var explicit_nll_loss(const VectorField& field, const ad::Var& mu_hat, const ad::Var& sigma_hat,
                          const ad::Array& x, const FlowConfig& cfg, const OdeConfig& ode, Rng& rng) {
  return ad::mean(explicit_nll_terms(field, mu_hat, sigma_hat, x, cfg, ode, rng));
}

double DensityGrid::integral() const {
  double s = 0.0;
  for (double lp : log_prob) s += std::exp(lp);
  return s * spacing_x * spacing_y;
}

std::vector<double> grid_axis(double lo, double hi, int steps) {
  if (steps < 2 || !(hi > lo)) throw InvalidArgument("grid: need steps >= 2 and hi > lo");
  std::vector<double> axis(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) axis[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  return axis;
}

DensityGrid flow_density_grid(const VectorField& field, const FlowConfig& cfg, const OdeConfig& ode, Rng& rng,
                              double lo, double hi, int steps) {
  if (field.dim() != 2) throw InvalidArgument("density grid: field must be 2-D");
  const std::vector<double> axis = grid_axis(lo, hi, steps);
  DensityGrid grid;
  grid.spacing_x = grid.spacing_y = (hi - lo) / (steps - 1);
  std::vector<double> pts;
  pts.reserve(axis.size() * axis.size() * 2);
  for (double y : axis) {
    for (double x : axis) {
      grid.x.push_back(x);
      grid.y.push_back(y);
      pts.push_back(x);
      pts.push_back(y);
    }
  }
  const std::size_t count = grid.x.size();
  DensityResult r = log_density(field, ad::Array({count, 2}, std::move(pts)), cfg, ode, rng);
  grid.log_prob.assign(r.log_prob.data().begin(), r.log_prob.data().end());
  return grid;
}

void write_density_grid_csv(const DensityGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << "x,y,log_prob,prob\n" << std::setprecision(17);
  for (std::size_t i = 0; i < grid.log_prob.size(); ++i) {
    out << grid.x[i] << ',' << grid.y[i] << ',' << grid.log_prob[i] << ',' << std::exp(grid.log_prob[i]) << '\n';
  }
}

}  // namespace cfre::flow
