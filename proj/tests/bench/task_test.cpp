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

#include <gtest/gtest.h>

#include <cmath>

#include "cfre/bench/task.hpp"
#include "cfre/errors.hpp"

using namespace cfre;
using namespace cfre::bench;

namespace {

struct Moments {
  std::vector<double> mean, var;
  double excess_kurtosis0 = 0.0;
};

Moments moments(const ad::Array& e) {
  const std::size_t n = e.rows(), D = e.cols();
  Moments m{std::vector<double>(D, 0.0), std::vector<double>(D, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < D; ++d) m.mean[d] += e.at(i, d) / n;
  double m4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < D; ++d) m.var[d] += std::pow(e.at(i, d) - m.mean[d], 2) / n;
    m4 += std::pow(e.at(i, 0) - m.mean[0], 4) / n;
  }
  m.excess_kurtosis0 = m4 / (m.var[0] * m.var[0]) - 3.0;
  return m;
}

}  // namespace

TEST(TaskKind, RoundTripsAndRejectsUnknown) {
  for (TaskKind k : {TaskKind::aniso_gaussian, TaskKind::aniso_laplace, TaskKind::heavy_tail_mixture,
                     TaskKind::skewed, TaskKind::bimodal}) {
    EXPECT_EQ(parse_task_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_task_kind("cauchy"), InvalidArgument);
}

TEST(Residuals, AnisotropicGaussianVariances) {
  Rng rng(1);
  const Moments m = moments(draw_residuals(TaskKind::aniso_gaussian, 100000, 2, rng));
  for (std::size_t d = 0; d < 2; ++d) {
    EXPECT_NEAR(m.var[d], axis_variance(d), 0.03 * axis_variance(d));
    EXPECT_NEAR(m.mean[d], 0.0, 0.02);
  }
  EXPECT_DOUBLE_EQ(axis_variance(0), 1.0);
  EXPECT_DOUBLE_EQ(axis_variance(1), 2.0);
}

TEST(Residuals, MixtureIsHeavyTailed) {
  // 0.9 N(0,1) + 0.1 N(0,9): variance 1.8, fourth moment 0.9*3 + 0.1*243.
  Rng rng(2);
  const Moments m = moments(draw_residuals(TaskKind::heavy_tail_mixture, 200000, 2, rng));
  const double closed = (0.9 * 3 + 0.1 * 243) / (1.8 * 1.8) - 3.0;
  EXPECT_GT(m.excess_kurtosis0, 0.0);
  EXPECT_NEAR(m.excess_kurtosis0, closed, 0.1 * closed);
}

TEST(Residuals, AllFamiliesFinite) {
  for (TaskKind k : {TaskKind::aniso_gaussian, TaskKind::aniso_laplace, TaskKind::heavy_tail_mixture,
                     TaskKind::skewed, TaskKind::bimodal}) {
    Rng rng(3);
    EXPECT_TRUE(draw_residuals(k, 1000, 3, rng).all_finite()) << to_string(k);
  }
}

TEST(Generate, ZeroNoiseGivesExactTargets) {
  SyntheticTask task;
  task.noise_scale = 0.0;
  const model::Dataset d = generate(task, 500);
  EXPECT_EQ(d.targets.to_vector(), target_function(task, d.inputs).to_vector());
  EXPECT_EQ(d.K, task.K);
  EXPECT_EQ(d.D, task.D);
  EXPECT_EQ(d.targets.cols(), task.K * task.D);
}

TEST(Generate, SeededRegenerationIsBitIdentical) {
  SyntheticTask task;
  task.samples = 1000;
  const model::Dataset a = generate(task), b = generate(task);
  EXPECT_EQ(a.inputs.to_vector(), b.inputs.to_vector());
  EXPECT_EQ(a.targets.to_vector(), b.targets.to_vector());
  task.seed = 1;
  EXPECT_NE(generate(task).targets.to_vector(), a.targets.to_vector());
}

TEST(Generate, NoiseScaleIsPositiveAndInputDependent) {
  SyntheticTask task;
  const model::Dataset d = generate(task, 200);
  const ad::Array s = noise_scale_field(task, d.inputs);
  double lo = 1e300, hi = 0.0;
  for (double v : s.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_GT(hi, lo);
}

TEST(Generate, RejectsBadTasks) {
  SyntheticTask t;
  t.K = 0;
  EXPECT_THROW(t.validate(), InvalidArgument);
  t = {};
  t.noise_scale = -1.0;
  EXPECT_THROW(t.validate(), InvalidArgument);
}

TEST(Split, ProportionsAndDisjointness) {
  SyntheticTask task;
  task.samples = 20000;
  const model::Dataset d = generate(task);
  const Split s = split_dataset(d, 0);
  EXPECT_EQ(s.train.size() + s.val.size() + s.test.size(), d.size());
  EXPECT_NEAR(s.train.size() / 20000.0, 0.8, 0.02);
  EXPECT_NEAR(s.val.size() / 20000.0, 0.1, 0.01);
  EXPECT_NEAR(s.test.size() / 20000.0, 0.1, 0.01);
  const Split again = split_dataset(d, 0);
  EXPECT_EQ(again.test.targets.to_vector(), s.test.targets.to_vector());
}
