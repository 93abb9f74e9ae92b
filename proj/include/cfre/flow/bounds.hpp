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

#include <cstddef>

#include "cfre/autodiff.hpp"
#include "cfre/flow/config.hpp"
#include "cfre/flow/field.hpp"

namespace cfre::flow {

struct PowerIterationOptions {
  int max_iterations = 50;
  double tolerance = 1e-8;  // relative change of the estimate between iterations
};

// Largest singular value. When the iteration does not settle within
// max_iterations, the best iterate is returned with converged = false.
struct SpectralNorm {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

double matrix_trace(const ad::Array& A);
double frobenius_norm(const ad::Array& A);
SpectralNorm spectral_norm(const ad::Array& A, const PowerIterationOptions& opts = {});

// Dense Jacobian df/dz [n x n] at a single point z [1 x n], built from n VJPs.
ad::Array jacobian(const VectorField& field, const ad::Array& z, double t);

struct LipschitzEstimate {
  double value = 0.0;        // max spectral norm over the sampled points
  bool all_converged = true;
  std::size_t samples = 0;
};

// Samples (z, t) with z ~ N(0, region_scale^2 I), t ~ U[0, 1] and returns the
// largest Jacobian spectral norm seen. This is a lower bound on the supremum.
LipschitzEstimate lipschitz_estimate_detailed(const VectorField& field, std::size_t region_samples, Rng& rng,
                                              double region_scale = 3.0, const PowerIterationOptions& opts = {});
double lipschitz_estimate(const VectorField& field, std::size_t region_samples, Rng& rng);

// Same maximum taken over caller-supplied states z [S x n] and times t [S x 1].
LipschitzEstimate lipschitz_at(const VectorField& field, const ad::Array& z, const ad::Array& t,
                               const PowerIterationOptions& opts = {});

// -z0_logprob + n * L_hat.
double upper_bound_value(double z0_logprob, std::size_t n, double L_hat);

}  // namespace cfre::flow
