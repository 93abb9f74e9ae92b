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
#include "cfre/model/regression.hpp"

namespace cfre::model {

// Per-sample log p(x | input) under the reparameterized model, [B x 1]:
//   sum over joints k of ( log p_flow(x_bar_k) - sum_d log sigma_hat_kd ),
// where one shared D-dimensional flow scores every joint's residual.
ad::Array joint_log_density(const ad::Array& mu, const ad::Array& sigma, const ad::Array& x, std::size_t K,
                            std::size_t D, const flow::VectorField& flow, const flow::FlowConfig& cfg,
                            const flow::OdeConfig& ode, Rng& rng);

ad::Array joint_log_density(const RegressionModel& model, const flow::VectorField& flow, const ad::Array& input,
                            const ad::Array& x, const flow::FlowConfig& cfg, const flow::OdeConfig& ode, Rng& rng);

// Per-sample log-density of the base distribution alone, [B x 1].
ad::Array base_log_density(BaseKind kind, const ad::Array& mu, const ad::Array& sigma, const ad::Array& x);

}  // namespace cfre::model
