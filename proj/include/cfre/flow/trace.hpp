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

// Largest state dimension for which the exact trace (one vector-Jacobian
// product per dimension) is allowed.
inline constexpr std::size_t kMaxExactTraceDim = 8;

struct FieldWithTrace {
  ad::Var value;  // f(z, t), [B x n]
  ad::Var trace;  // tr(df/dz) per row, [B x 1]
};

// Evaluates f once and takes n vector-Jacobian products against the basis
// vectors. With create_graph the trace stays differentiable in the field
// parameters and in z.
FieldWithTrace field_and_exact_trace(const VectorField& field, const ad::Var& z, const ad::Var& t,
                                     bool create_graph);

// Hutchinson estimate with a fixed probe matrix of shape [(P*B) x n]: row
// p*B + r is probe p for state row r. The estimate is the mean over p of
// eps^T J eps.
FieldWithTrace field_and_probe_trace(const VectorField& field, const ad::Var& z, const ad::Var& t,
                                     const ad::Array& probes, bool create_graph);

// Probe vectors with identity covariance.
ad::Array draw_probes(std::size_t rows, std::size_t dim, ProbeLaw law, Rng& rng);

ad::Var exact_trace(const VectorField& field, const ad::Var& z, double t, bool create_graph = true);

ad::Var hutchinson_trace(const VectorField& field, const ad::Var& z, double t, int probes, ProbeLaw law, Rng& rng,
                         bool create_graph = true);

}  // namespace cfre::flow
