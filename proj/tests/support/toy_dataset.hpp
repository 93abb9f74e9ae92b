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

#include <cmath>
#include <random>

#include "cfre/model/train.hpp"

namespace cfre::testing {

// Small regression problem: targets are a smooth function of the inputs plus
// Laplace noise whose scale depends on the first input.
inline model::Dataset toy_dataset(std::size_t n, std::size_t K, std::size_t D, std::uint64_t seed,
                                  std::size_t input_dim = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> in(n * input_dim), out(n * K * D);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < input_dim; ++j) in[i * input_dim + j] = normal(rng);
    const double scale = 0.05 + 0.1 / (1.0 + std::exp(-2.0 * in[i * input_dim]));
    for (std::size_t c = 0; c < K * D; ++c) {
      const double mean = std::sin(in[i * input_dim + c % input_dim]) + 0.3 * static_cast<double>(c);
      const double noise = (sign(rng) ? 1.0 : -1.0) * expo(rng) * scale / std::sqrt(2.0);
      out[i * K * D + c] = mean + noise;
    }
  }
  return {ad::Array({n, input_dim}, std::move(in)), ad::Array({n, K * D}, std::move(out)), K, D};
}

}  // namespace cfre::testing
