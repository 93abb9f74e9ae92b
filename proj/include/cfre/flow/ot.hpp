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

// Straight-line conditional path z(t) = (1 - (1 - sigma_min) t) z0 + t z1.
ad::Array ot_path(const ad::Array& z0, const ad::Array& z1, double t, double sigma_min);

// Conditional target velocity
//   u = (z1 - (1 - sigma_min) z_t) / (1 - (1 - sigma_min) t).
// Throws SingularityError when the denominator is <= 1e-12.
ad::Array ot_target_field(const ad::Array& z_t, const ad::Array& z1, double t, double sigma_min);

// One Monte-Carlo draw of the flow-matching regression problem for a batch
// of data rows x_bar [B x n]: per row t ~ U[0,1] and z0 ~ N(0, I).
struct PathSample {
  ad::Array z0;
  ad::Array z1;
  ad::Array t;    // [B x 1]
  ad::Array z_t;
  ad::Array u_t;  // x_bar - (1 - sigma_min) z0
};

PathSample sample_path(const ad::Array& x_bar, double sigma_min, Rng& rng);

// Per-row squared error ||f(z_t, t) - u_t||^2 as a [B x 1] node.
ad::Var flow_matching_terms(const VectorField& field, const PathSample& sample);

// Batch mean of flow_matching_terms with a fresh path sample.
// Throws InvalidArgument on an empty batch or non-finite x_bar.
ad::Var flow_matching_loss(const VectorField& field, const ad::Array& x_bar, const FlowConfig& cfg, Rng& rng);

}  // namespace cfre::flow
