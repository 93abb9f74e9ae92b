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
#include "cfre/model/regression.hpp"

namespace cfre::model {

// Per-element base negative log-likelihoods, same shape as the inputs.
//   laplace:  log(sqrt(2) sigma) + sqrt(2) |r| / sigma
//   gaussian: log sigma + r^2 / (2 sigma^2) + log(2 pi) / 2
// Throw InvalidArgument if any sigma <= 0.
ad::Var laplace_terms(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target);
ad::Var gaussian_terms(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target);
ad::Var base_terms(BaseKind kind, const ad::Var& mu, const ad::Var& sigma, const ad::Var& target);

// Batch reduction used by every regression loss: sum over joints and axes,
// mean over the batch.
ad::Var reduce_batch(const ad::Var& terms);

ad::Var laplace_nll(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target);
ad::Var gaussian_nll(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target);
ad::Var base_nll(BaseKind kind, const ad::Var& mu, const ad::Var& sigma, const ad::Var& target);

// x_bar = (x - mu) / sigma and its inverse.
ad::Array standardize(const ad::Array& x, const ad::Array& mu, const ad::Array& sigma);
ad::Array destandardize(const ad::Array& x_bar, const ad::Array& mu, const ad::Array& sigma);

// lambda_b = c * (1 - mean_j sigma_hat[b, j]), [B x 1].
ad::Array lambda_weights(const ad::Array& sigma_hat, double c);

// reg_loss + mean_b lambda_b * flow_loss_b with lambda a constant (no
// gradient reaches sigma_hat through it). flow_loss is [B x 1] per-sample
// flow losses (or a scalar when B = 1). c = 0 returns reg_loss itself.
ad::Var cfre_loss(const ad::Var& reg_loss, const ad::Var& flow_loss, const ad::Var& sigma_hat, double c);

}  // namespace cfre::model
