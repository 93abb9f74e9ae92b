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

#include "cfre/autodiff.hpp"
#include "cfre/flow/config.hpp"
#include "cfre/flow/field.hpp"

namespace cfre::flow {

// Solves dz/dt = f(z, t) from t = 0 to t = 1 with classical RK4 for each row
// of z0 [B x n]. Throws NumericInstability naming the step at which the
// state stopped being finite.
ad::Array integrate_sample(const VectorField& field, const ad::Array& z0, const OdeConfig& ode);

// Draws `count` base samples z0 ~ N(0, I) and pushes them through the flow.
ad::Array sample_flow(const VectorField& field, std::size_t count, const OdeConfig& ode, Rng& rng);

}  // namespace cfre::flow
