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

#include <cstdint>
#include <string>
#include <vector>

#include "cfre/model/train.hpp"

namespace cfre::bench {

enum class TaskKind { aniso_gaussian, aniso_laplace, heavy_tail_mixture, skewed, bimodal };

std::string to_string(TaskKind k);
TaskKind parse_task_kind(const std::string& s);

// Synthetic keypoint-style regression: targets are a fixed smooth function of
// Gaussian inputs plus a residual drawn from `kind`, scaled per sample by
//   noise_scale * (0.05 + 0.1 * sigmoid(2 * input[0])).
// Residual covariance per joint is anisotropic: variance 1 on even axes and 2
// on odd axes (vertical twice the horizontal for D = 2).
struct SyntheticTask {
  TaskKind kind = TaskKind::heavy_tail_mixture;
  std::size_t input_dim = 8;
  std::size_t K = 3;
  std::size_t D = 2;
  std::size_t samples = 20000;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SyntheticTask&) const = default;
};

// Residual variance of axis d before the per-sample scale.
double axis_variance(std::size_t d);

// Unit-scale residual draws of the task's family, [n x D]; covariance is
// diag(axis_variance) for every kind.
ad::Array draw_residuals(TaskKind kind, std::size_t n, std::size_t D, Rng& rng);

// Deterministic part of the targets, [n x K*D].
ad::Array target_function(const SyntheticTask& task, const ad::Array& inputs);

// Per-sample residual scale, [n x 1].
ad::Array noise_scale_field(const SyntheticTask& task, const ad::Array& inputs);

model::Dataset generate(const SyntheticTask& task, std::size_t n);
inline model::Dataset generate(const SyntheticTask& task) { return generate(task, task.samples); }

struct Split {
  model::Dataset train, val, test;
};

// Row i goes to train / val / test when a seeded hash of i falls in
// [0, 0.8) / [0.8, 0.9) / [0.9, 1).
Split split_dataset(const model::Dataset& data, std::uint64_t seed);

}  // namespace cfre::bench
