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

// Checks that need a trained field. Training is the expensive part, so the
// checks share one test body (ctest runs each TEST in its own process).
#include <gtest/gtest.h>

#include <cmath>

#include "cfre/flow/bounds.hpp"
#include "cfre/flow/density.hpp"
#include "cfre/flow/ode.hpp"
#include "cfre/runtime.hpp"
#include "flow_training.hpp"

namespace cfre::flow {
namespace {

using ad::Array;

TEST(TrainedFlowTest, ConservationAndConsistency) {
  tune_allocator();
  std::mt19937_64 rng(2024);
  const Array data = testing::laplace_samples(20000, 2, rng);
  const VectorFieldNet net = testing::train_flow_matching(data, 1500, 256, 7);
  const OdeConfig ode{.steps = 32};

  // Normalization on a coarse quadrature grid.
  const DensityGrid grid = flow_density_grid(net, {}, ode, rng, -8.0, 8.0, 81);
  EXPECT_NEAR(grid.integral(), 1.0, 0.05);

  // Round trip: sample moments vs quadrature moments of exp(log_prob).
  const Array samples = sample_flow(net, 10000, ode, rng);
  double w = 0, qm[2] = {0, 0}, qc[3] = {0, 0, 0};
  for (std::size_t i = 0; i < grid.log_prob.size(); ++i) {
    const double p = std::exp(grid.log_prob[i]);
    w += p;
    qm[0] += p * grid.x[i];
    qm[1] += p * grid.y[i];
  }
  qm[0] /= w;
  qm[1] /= w;
  for (std::size_t i = 0; i < grid.log_prob.size(); ++i) {
    const double p = std::exp(grid.log_prob[i]) / w, dx = grid.x[i] - qm[0], dy = grid.y[i] - qm[1];
    qc[0] += p * dx * dx;
    qc[1] += p * dx * dy;
    qc[2] += p * dy * dy;
  }
  double sm[2] = {0, 0}, sc[3] = {0, 0, 0};
  const double m = static_cast<double>(samples.rows());
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    sm[0] += samples.at(r, 0) / m;
    sm[1] += samples.at(r, 1) / m;
  }
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const double dx = samples.at(r, 0) - sm[0], dy = samples.at(r, 1) - sm[1];
    sc[0] += dx * dx / (m - 1);
    sc[1] += dx * dy / (m - 1);
    sc[2] += dy * dy / (m - 1);
  }
  // 5% of the marginal scale for means and the covariance off-diagonal
  // (both are near zero, so a relative band would be meaningless).
  const double sx = std::sqrt(qc[0]), sy = std::sqrt(qc[2]);
  EXPECT_NEAR(sm[0], qm[0], 0.05 * sx);
  EXPECT_NEAR(sm[1], qm[1], 0.05 * sy);
  EXPECT_NEAR(sc[0], qc[0], 0.05 * qc[0]);
  EXPECT_NEAR(sc[2], qc[2], 0.05 * qc[2]);
  EXPECT_NEAR(sc[1], qc[1], 0.05 * sx * sy);

  // Exact and Hutchinson (1e3 probes) NLLs agree within 5%. Every probe is
  // a full row through the network, so this uses few points and steps.
  const Array held_out = testing::laplace_samples(50, 2, rng);
  const OdeConfig coarse{.steps = 8};
  FlowConfig hutch;
  hutch.trace_mode = TraceMode::hutchinson;
  hutch.hutchinson_probes = 1000;
  const DensityResult exact = log_density(net, held_out, {}, coarse, rng);
  const DensityResult approx = log_density(net, held_out, hutch, coarse, rng);
  double ne = 0, na = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    ne -= exact.log_prob.at(i, 0) / 50;
    na -= approx.log_prob.at(i, 0) / 50;
  }
  EXPECT_NEAR(na, ne, 0.05 * std::abs(ne));

  // Upper bound: -log N(z0) + n L_hat >= NLL for every held-out point.
  const Array points = testing::laplace_samples(1000, 2, rng);
  const DensityResult d = log_density(net, points, {}, ode, rng);
  const double L_hat = lipschitz_estimate(net, 2000, rng);
  int violations = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const double log_n = d.log_prob.at(i, 0) + d.trace_integral.at(i, 0);
    if (upper_bound_value(log_n, 2, L_hat) < -d.log_prob.at(i, 0)) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

}  // namespace
}  // namespace cfre::flow
