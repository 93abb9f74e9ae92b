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

#include "cfre/bench/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "cfre/autodiff.hpp"
#include "cfre/bench/task.hpp"
#include "cfre/flow/bounds.hpp"
#include "cfre/flow/density.hpp"
#include "cfre/flow/ode.hpp"
#include "cfre/flow/ot.hpp"
#include "cfre/flow/trace.hpp"
#include "cfre/model/losses.hpp"
#include "cfre/uq/metrics.hpp"

namespace cfre::bench {

namespace {

ad::Array normal_array(ad::Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> d(ad::shape_size(shape));
  for (auto& v : d) v = n(rng);
  return ad::Array(std::move(shape), std::move(d));
}

SelftestCheck gradients() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ad::Array W = normal_array({3, 4}, rng), y = normal_array({2, 4}, rng);
    const ad::ScalarFn f = [&](const ad::Var& x) {
      const ad::Var h = ad::tanh(ad::matmul(x, ad::constant(W)));
      const ad::Var sigma = ad::sigmoid(h) * 0.9 + 0.05;
      return model::laplace_nll(h, sigma, ad::constant(y)) + ad::mean(ad::square(ad::softplus(h)));
    };
    worst = std::max(worst, ad::check_gradient(f, normal_array({2, 3}, rng)).max_rel_error);
  }
  std::ostringstream d;
  d << "max relative error " << worst;
  return {"gradients", worst < 1e-4, d.str()};
}

SelftestCheck norm_inequalities() {
  std::mt19937_64 rng(2);
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const ad::Array A = normal_array({n, n}, rng);
    const double tr = flow::matrix_trace(A), fro = flow::frobenius_norm(A);
    const double spec = flow::spectral_norm(A, {.max_iterations = 2000, .tolerance = 1e-14}).value;
    const double rn = std::sqrt(static_cast<double>(n));
    ok = ok && tr <= rn * fro + 1e-9 && rn * fro <= static_cast<double>(n) * spec + 1e-9;
  }
  std::vector<double> eye(9, 0.0);
  eye[0] = eye[4] = eye[8] = 2.5;
  const ad::Array I({3, 3}, eye);
  ok = ok && std::abs(flow::matrix_trace(I) - std::sqrt(3.0) * flow::frobenius_norm(I)) < 1e-12;
  return {"trace_norm_inequalities", ok, "200 random matrices plus a scaled identity"};
}

SelftestCheck ode_accuracy() {
  const auto decay = flow::affine_field(ad::Array::matrix({{-1.0}}), ad::Array::matrix({{0.0}}));
  const auto solve = [&](int steps) {
    return flow::integrate_sample(decay, ad::Array::matrix({{1.0}}), flow::OdeConfig{.steps = steps}).item();
  };
  const double err100 = std::abs(solve(100) - std::exp(-1.0));
  const double e8 = std::abs(solve(8) - std::exp(-1.0)), e16 = std::abs(solve(16) - std::exp(-1.0));
  const double order = std::log2(e8 / e16);
  std::ostringstream d;
  d << "error at 100 steps " << err100 << ", order " << order;
  return {"rk4", err100 < 1e-6 && order >= 3.5 && order <= 4.5, d.str()};
}

SelftestCheck hutchinson() {
  const ad::Array A = ad::Array::matrix({{2.0, 0.3, -0.1}, {0.2, 1.5, 0.4}, {-0.3, 0.1, 2.5}});
  const auto field = flow::affine_field(A, ad::Array::zeros({1, 3}));
  Rng rng(3);
  const double est =
      flow::hutchinson_trace(field, ad::constant(ad::Array::zeros({1, 3})), 0.5, 10000, flow::ProbeLaw::gaussian, rng,
                             false)
          .item();
  std::ostringstream d;
  d << "estimate " << est << " vs exact 6";
  return {"hutchinson", std::abs(est - 6.0) / 6.0 < 0.02, d.str()};
}

SelftestCheck identity_density() {
  std::mt19937_64 rng(4);
  const ad::Array x = normal_array({50, 2}, rng, 2.0);
  Rng r(0);
  const flow::DensityResult res = flow::log_density(flow::zero_field(2), x, {}, flow::OdeConfig{.steps = 8}, r);
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const double ref = -0.5 * (x.at(i, 0) * x.at(i, 0) + x.at(i, 1) * x.at(i, 1)) - std::log(2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(res.log_prob[i] - ref));
  }
  std::ostringstream d;
  d << "max deviation " << worst;
  return {"identity_flow_density", worst < 1e-12, d.str()};
}

SelftestCheck loss_values() {
  const auto one = [](double v) { return ad::constant(ad::Array::matrix({{v}})); };
  const double a = model::laplace_nll(one(0.0), one(1.0), one(1.0)).item();
  const double b = model::gaussian_nll(one(0.0), one(1.0), one(0.0)).item();
  const double c = model::cfre_loss(ad::constant(1.0), ad::constant(2.0), one(0.3), 0.1).item();
  const bool ok = std::abs(a - 1.7608) < 5e-5 && std::abs(b - 0.9189) < 5e-5 && std::abs(c - 1.14) < 1e-12;
  return {"loss_hand_values", ok, "laplace 1.7608, gaussian 0.9189, weighted flow term 0.14"};
}

std::vector<double> brute_curve(const std::vector<uq::PredictionRecord>& r, const std::vector<double>& grid) {
  const std::size_t n = r.size();
  double full = 0.0;
  for (const auto& x : r) full += x.error;
  full /= static_cast<double>(n);
  std::vector<double> out;
  for (double phi : grid) {
    std::size_t k = std::min(n - 1, uq::removal_count(phi, n));
    std::vector<bool> gone(n, false);
    for (std::size_t s = 0; s < k; ++s) {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!gone[i] && (best == n || r[i].uncertainty > r[best].uncertainty)) best = i;
      }
      gone[best] = true;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!gone[i]) sum += r[i].error;
    }
    out.push_back(full > 0 ? sum / static_cast<double>(n - k) / full : sum / static_cast<double>(n - k));
  }
  return out;
}

SelftestCheck sparsification() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> small(0, 4);
  const auto grid = uq::default_fractions();
  bool ok = true;
  for (std::size_t n = 1; n <= 10 && ok; ++n) {
    for (int t = 0; t < 10; ++t) {
      std::vector<uq::PredictionRecord> r(n);
      for (auto& x : r) x = {static_cast<double>(small(rng)), static_cast<double>(small(rng)), 0.5};
      ok = ok && uq::sparsification_curve(r, uq::RankBy::uncertainty, grid).remaining_error == brute_curve(r, grid);
    }
  }
  std::vector<uq::PredictionRecord> hand;
  for (int e = 5; e >= 1; --e) hand.push_back({double(e), double(e), 0.5});
  const auto c = uq::sparsification_curve(hand, uq::RankBy::uncertainty, {0.0, 0.2, 0.4});
  ok = ok && std::abs(c.remaining_error[1] - 2.5 / 3) < 1e-15 && std::abs(c.remaining_error[2] - 2.0 / 3) < 1e-15;
  return {"sparsification", ok, "brute force N <= 10 and the 5-record hand case"};
}

SelftestCheck degeneration() {
  SyntheticTask task;
  task.samples = 300;
  task.K = 1;
  const Split s = split_dataset(generate(task), 0);
  model::CfreConfig cfg;
  cfg.c = 0.0;
  cfg.epochs = 1;
  cfg.batch_size = 64;
  cfg.hidden = {8};
  cfg.flow_hidden = {8};
  cfg.monitor_samples = 8;
  cfg.monitor_ode_steps = 2;
  const model::TrainedCfre a = model::train_cfre(s.train, s.val, cfg);
  const model::TrainedCfre b = model::train_heteroscedastic(s.train, s.val, cfg, model::BaseKind::laplace);
  bool same = true;
  for (std::size_t i = 0; i < a.regression.parameters().size(); ++i) {
    same = same && a.regression.parameters()[i].value().to_vector() == b.regression.parameters()[i].value().to_vector();
  }
  return {"c0_equals_laplace", same, "one epoch, identical seeds"};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::ostream& out) {
  const std::vector<std::function<SelftestCheck()>> checks{gradients,        norm_inequalities, ode_accuracy,
                                                           hutchinson,       identity_density,  loss_values,
                                                           sparsification,   degeneration};
  std::vector<SelftestCheck> results;
  for (const auto& check : checks) {
    SelftestCheck r = check();
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace cfre::bench
