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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "cfre/errors.hpp"
#include "cfre/flow/ode.hpp"
#include "cfre/flow/trace.hpp"
#include "random_arrays.hpp"

namespace cfre::flow {
namespace {

using ad::Array;

double normal_log_prob(const Array& x, std::size_t r) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) s += x.at(r, j) * x.at(r, j);
  return -0.5 * s - 0.5 * static_cast<double>(x.cols()) * std::log(2 * std::numbers::pi);
}

TEST(DensityTest, IdentityFlowIsStandardNormal) {
  std::mt19937_64 rng(1);
  const Array x = testing::random_normal({50, 3}, rng, 2.0);
  const DensityResult r = log_density(zero_field(3), x, {}, {}, rng);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_NEAR(r.log_prob.at(i, 0), normal_log_prob(x, i), 1e-12);
    EXPECT_EQ(r.trace_integral.at(i, 0), 0.0);
  }
  EXPECT_EQ(r.z0_terminal, x);
}

TEST(DensityTest, AffineFieldTraceIntegralIsTraceOfA) {
  const Array A = Array::matrix({{0.3, 1.0}, {-0.4, -0.9}});
  const Array b = Array::row({0.5, -1.0});
  std::mt19937_64 rng(2);
  for (TraceMode mode : {TraceMode::exact, TraceMode::hutchinson}) {
    FlowConfig cfg;
    cfg.trace_mode = mode;
    cfg.probe_law = ProbeLaw::rademacher;
    const DensityResult r = log_density(affine_field(A, b), testing::random_normal({10, 2}, rng), cfg, {}, rng);
    for (std::size_t i = 0; i < 10; ++i) {
      // Rademacher on a constant A: eps^T A eps = tr(A) + off-diagonal terms,
      // so only the exact mode is exact; hutchinson is checked for finiteness.
      if (mode == TraceMode::exact) {
        EXPECT_NEAR(r.trace_integral.at(i, 0), -0.6, 1e-12);
      } else {
        EXPECT_TRUE(std::isfinite(r.trace_integral.at(i, 0)));
      }
    }
  }
}

TEST(DensityTest, LinearFieldMatchesClosedForm) {
  // f(z) = a z pushes N(0, I) to N(0, e^{2a} I).
  const double a = 0.4;
  FunctionField f(2, [a](const ad::Var& z, const ad::Var&) { return z * a; });
  std::mt19937_64 rng(3);
  const Array x = testing::random_normal({20, 2}, rng);
  const DensityResult r = log_density(f, x, {}, {}, rng);
  for (std::size_t i = 0; i < 20; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < 2; ++j) sq += x.at(i, j) * x.at(i, j);
    const double var = std::exp(2 * a);
    const double expected = -0.5 * sq / var - std::log(2 * std::numbers::pi * var);
    EXPECT_NEAR(r.log_prob.at(i, 0), expected, 1e-9);
  }
}

// Invariant: log_prob = log N(z0_terminal) - trace_integral.
TEST(DensityTest, ResultDecomposition) {
  std::mt19937_64 rng(4);
  VectorFieldNet net(VectorFieldNet::default_widths(2), rng);
  const DensityResult r = log_density(net, testing::random_normal({30, 2}, rng), {}, {.steps = 16}, rng);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_NEAR(r.log_prob.at(i, 0), normal_log_prob(r.z0_terminal, i) - r.trace_integral.at(i, 0), 1e-12);
  }
}

TEST(DensityTest, BackwardIntegrationInvertsSampling) {
  std::mt19937_64 rng(5);
  VectorFieldNet net(VectorFieldNet::default_widths(2), rng);
  const Array z0 = testing::random_normal({10, 2}, rng);
  const Array x = integrate_sample(net, z0, {});
  const DensityResult r = log_density(net, x, {}, {}, rng);
  for (std::size_t i = 0; i < z0.size(); ++i) EXPECT_NEAR(r.z0_terminal[i], z0[i], 1e-6);
}

TEST(DensityTest, NonFiniteDataRejected) {
  std::mt19937_64 rng(6);
  EXPECT_THROW(log_density(zero_field(2), Array::matrix({{NAN, 0.0}}), {}, {}, rng), InvalidArgument);
}

TEST(DensityTest, NonFiniteTraceReported) {
  FunctionField bad(1, [](const ad::Var& z, const ad::Var&) { return ad::exp(ad::square(z) * 400.0); });
  std::mt19937_64 rng(7);
  EXPECT_THROW(log_density(bad, Array::matrix({{2.0}}), {}, {.steps = 4}, rng), NumericInstability);
}

TEST(DensityTest, GraphGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  VectorFieldNet net({3, 8, 8, 2}, rng);
  const Array x = testing::random_normal({4, 2}, rng);
  const OdeConfig ode{.steps = 6};
  const auto loss = [&](const VectorFieldNet& f) {
    std::mt19937_64 r(0);
    return ad::mean(log_density_graph(f, ad::constant(x), {}, ode, r, true).log_prob);
  };
  const auto g = ad::grad(loss(net), net.parameters());
  std::vector<Array> base;
  for (const auto& p : net.parameters()) base.push_back(p.value());
  const double h = 1e-5;
  for (std::size_t k = 0; k < base.size(); ++k) {
    for (std::size_t i = 0; i < base[k].size(); i += 5) {
      auto plus = base, minus = base;
      std::vector<double> a(base[k].data().begin(), base[k].data().end()), b = a;
      a[i] += h;
      b[i] -= h;
      plus[k] = Array(base[k].shape(), a);
      minus[k] = Array(base[k].shape(), b);
      const double fd =
          (loss(VectorFieldNet(net.widths(), plus)).item() - loss(VectorFieldNet(net.widths(), minus)).item()) /
          (2 * h);
      EXPECT_NEAR(g[k].value()[i], fd, 1e-6 + 1e-4 * std::abs(fd)) << "param " << k << " index " << i;
    }
  }
}

TEST(ExplicitNllTest, IdentityFlowZeroResidual) {
  std::mt19937_64 rng(9);
  const Array x = testing::random_normal({5, 2}, rng);
  const ad::Var l = explicit_nll_loss(zero_field(2), ad::constant(x), ad::constant(Array::full({5, 2}, 1.0)), x, {},
                                      {}, rng);
  EXPECT_NEAR(l.item(), std::log(2 * std::numbers::pi), 1e-12);
}

TEST(ExplicitNllTest, SigmaShiftsByLogSigma) {
  std::mt19937_64 rng(10);
  const Array xbar = Array::matrix({{0.3, -0.2}});
  const Array mu = Array::matrix({{1.0, 1.0}});
  // x chosen so that (x - mu) / sigma is the same x_bar for both sigmas.
  const auto nll = [&](double sigma) {
    const Array x({1, 2}, {mu[0] + sigma * xbar[0], mu[1] + sigma * xbar[1]});
    return explicit_nll_loss(zero_field(2), ad::constant(mu), ad::constant(Array::full({1, 2}, sigma)), x, {}, {},
                             rng)
        .item();
  };
  EXPECT_NEAR(nll(0.5) - nll(1.0), 2 * std::log(0.5), 1e-12);
}

TEST(ExplicitNllTest, RejectsNonPositiveSigma) {
  std::mt19937_64 rng(11);
  const Array x = Array::zeros({1, 2});
  EXPECT_THROW(explicit_nll_loss(zero_field(2), ad::constant(x), ad::constant(Array::matrix({{1.0, 0.0}})), x, {}, {},
                                 rng),
               InvalidArgument);
}

TEST(ExplicitNllTest, DifferentiableInRegressionOutputs) {
  std::mt19937_64 rng(12);
  VectorFieldNet net({3, 8, 2}, rng);
  const Array x = testing::random_normal({3, 2}, rng);
  const Array mu0 = testing::random_normal({3, 2}, rng, 0.5);
  const Array s0 = Array::full({3, 2}, 0.7);
  const OdeConfig ode{.steps = 4};
  const auto f = [&](const Array& mu, const Array& s) {
    std::mt19937_64 r(0);
    return explicit_nll_loss(net, ad::constant(mu), ad::constant(s), x, {}, ode, r).item();
  };
  ad::Var mu = ad::parameter(mu0), sigma = ad::parameter(s0);
  std::mt19937_64 r(0);
  const auto g = ad::grad(explicit_nll_loss(net, mu, sigma, x, {}, ode, r), {mu, sigma});
  const double h = 1e-6;
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<double> p(mu0.data().begin(), mu0.data().end()), m = p;
    p[i] += h;
    m[i] -= h;
    EXPECT_NEAR(g[0].value()[i], (f(Array(mu0.shape(), p), s0) - f(Array(mu0.shape(), m), s0)) / (2 * h), 1e-6);
    std::vector<double> sp(s0.data().begin(), s0.data().end()), sm = sp;
    sp[i] += h;
    sm[i] -= h;
    EXPECT_NEAR(g[1].value()[i], (f(mu0, Array(s0.shape(), sp)) - f(mu0, Array(s0.shape(), sm))) / (2 * h), 1e-6);
  }
}

TEST(DensityGridTest, StandardNormalIntegratesToOne) {
  std::mt19937_64 rng(13);
  const DensityGrid g = flow_density_grid(zero_field(2), {}, {.steps = 1}, rng, -8, 8, 81);
  EXPECT_EQ(g.log_prob.size(), 81u * 81u);
  EXPECT_NEAR(g.integral(), 1.0, 1e-6);
  EXPECT_EQ(g.x[1], -7.8);
  EXPECT_EQ(g.y[1], -8.0);
}

TEST(DensityGridTest, CsvLayout) {
  std::mt19937_64 rng(14);
  const DensityGrid g = flow_density_grid(zero_field(2), {}, {.steps = 1}, rng, -1, 1, 3);
  const auto path = std::filesystem::temp_directory_path() / "cfre_grid_test.csv";
  write_density_grid_csv(g, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,log_prob,prob");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 9);
  std::filesystem::remove(path);
}

TEST(DensityGridTest, RejectsBadAxis) {
  EXPECT_THROW(grid_axis(1.0, 0.0, 5), InvalidArgument);
  EXPECT_THROW(grid_axis(0.0, 1.0, 1), InvalidArgument);
}

}  // namespace
}  // namespace cfre::flow
