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

#include <random>

#include "cfre/autodiff/array.hpp"

namespace cfre::testing {

inline ad::Array random_normal(ad::Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> d(ad::shape_size(shape));
  for (auto& v : d) v = n(rng);
  return ad::Array(std::move(shape), std::move(d));
}

inline ad::Array random_uniform(ad::Shape shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> d(ad::shape_size(shape));
  for (auto& v : d) v = u(rng);
  return ad::Array(std::move(shape), std::move(d));
}

}  // namespace cfre::testing
