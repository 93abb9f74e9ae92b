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

#include "cfre/flow/trace.hpp"

#include "cfre/errors.hpp"

namespace cfre::flow {

namespace {

ad::Var time_column(std::size_t rows, double t) { return ad::constant(ad::Array::full({rows, 1}, t)); }

// The Jacobian is taken with respect to this node; constants get a fresh leaf.
ad::Var differentiable_state(const ad::Var& z) { return z.requires_grad() ? z : ad::parameter(z.value()); }

void check_state(const VectorField& field, const ad::Var& z) {
  if (z.shape().size() != 2 || z.shape()[1] != field.dim()) {
    throw InvalidArgument("trace: state " + ad::shape_string(z.shape()) + " does not match field dim " +
                          std::to_string(field.dim()));
  }
}

}  // namespace

FieldWithTrace field_and_exact_trace(const VectorField& field, const ad::Var& z, const ad::Var& t,
                                     bool create_graph) {
  check_state(field, z);
  const std::size_t rows = z.shape()[0], n = z.shape()[1];
  if (n > kMaxExactTraceDim) {
    throw InvalidArgument("exact_trace: dimension " + std::to_string(n) + " exceeds guard " +
                          std::to_string(kMaxExactTraceDim));
  }
  ad::GradModeGuard on(true);
  const ad::Var zin = differentiable_state(z);
  ad::Var f = field.evaluate(zin, t);
  ad::Var trace;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> basis(rows * n, 0.0);
    for (std::size_t r = 0; r < rows; ++r) basis[r * n + i] = 1.0;
    ad::Var out = ad::sum(f * ad::constant(ad::Array({rows, n}, std::move(basis))));
    ad::Var row_i = ad::grad(out, {zin}, create_graph)[0];
    ad::Var diag = ad::slice_cols(row_i, i, i + 1);
    trace = trace.defined() ? trace + diag : diag;
  }
  if (!create_graph) {
    f = ad::detach(f);
    trace = ad::detach(trace);
  }
  return {f, trace};
}

FieldWithTrace field_and_probe_trace(const VectorField& field, const ad::Var& z, const ad::Var& t,
                                     const ad::Array& probes, bool create_graph) {
  check_state(field, z);
  const std::size_t rows = z.shape()[0], n = z.shape()[1];
  if (probes.rank() != 2 || probes.cols() != n || probes.rows() % rows != 0) {
    throw InvalidArgument("hutchinson: probe matrix " + ad::shape_string(probes.shape()) + " incompatible with state " +
                          ad::shape_string(z.shape()));
  }
  const std::size_t p = probes.rows() / rows;
  ad::GradModeGuard on(true);
  const ad::Var zin = differentiable_state(z);
  const ad::Var zrep = p == 1 ? zin : ad::repeat_rows(zin, p);
  const ad::Var trep = p == 1 ? t : ad::repeat_rows(t, p);
  ad::Var frep = field.evaluate(zrep, trep);
  const ad::Var eps = ad::constant(probes);
  ad::Var vjp = ad::grad(ad::sum(frep * eps), {zrep}, create_graph)[0];
  ad::Var quad = ad::sum(vjp * eps, 1);
  ad::Var trace = p == 1 ? quad : ad::reshape(ad::mean(ad::reshape(quad, {p, rows}), 0), {rows, 1});
  ad::Var f = p == 1 ? frep : field.evaluate(zin, t);
  if (!create_graph) {
    f = ad::detach(f);
    trace = ad::detach(trace);
  }
  return {f, trace};
}

ad::Array draw_probes(std::size_t rows, std::size_t dim, ProbeLaw law, Rng& rng) {
  std::vector<double> d(rows * dim);
  if (law == ProbeLaw::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : d) v = normal(rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (auto& v : d) v = coin(rng) ? 1.0 : -1.0;
  }
  return ad::Array({rows, dim}, std::move(d));
}

ad::Var exact_trace(const VectorField& field, const ad::Var& z, double t, bool create_graph) {
  return field_and_exact_trace(field, z, time_column(z.shape()[0], t), create_graph).trace;
}

ad::Var hutchinson_trace(const VectorField& field, const ad::Var& z, double t, int probes, ProbeLaw law, Rng& rng,
                         bool create_graph) {
  if (probes < 1) throw InvalidArgument("hutchinson_trace: probes must be >= 1");
  check_state(field, z);
  const std::size_t rows = z.shape()[0];
  const ad::Array eps = draw_probes(rows * static_cast<std::size_t>(probes), field.dim(), law, rng);
  ad::Var trace = field_and_probe_trace(field, z, time_column(rows, t), eps, create_graph).trace;
  if (!trace.value().all_finite()) throw NumericInstability("hutchinson_trace: non-finite estimate");
  return trace;
}

}  // namespace cfre::flow
