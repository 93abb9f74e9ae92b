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

#include "cfre/flow/bounds.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "cfre/errors.hpp"

namespace cfre::flow {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_square(const ad::Array& A, const char* who) {
  if (A.rank() != 2 || A.rows() != A.cols() || A.rows() == 0) {
    throw InvalidArgument(std::string(who) + ": expected a square matrix, got " + ad::shape_string(A.shape()));
  }
}

SpectralNorm power_iterate(const RowMatrix& m, const PowerIterationOptions& opts) {
  const Eigen::Index n = m.cols();
  // Fixed, non-symmetric start so results are reproducible and unlikely to be
  // orthogonal to the leading singular vector.
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(1.0 + 1.7 * static_cast<double>(i));
  v.normalize();
  SpectralNorm out;
  double prev = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::VectorXd u = m * v;
    const double sigma = u.norm();
    out.iterations = it;
    out.value = std::max(out.value, sigma);
    if (sigma == 0.0) {
      out.converged = true;
      return out;
    }
    Eigen::VectorXd w = m.transpose() * u;
    v = w / w.norm();
    if (it > 1 && std::abs(sigma - prev) <= opts.tolerance * std::max(sigma, 1e-300)) {
      out.converged = true;
      return out;
    }
    prev = sigma;
  }
  return out;
}

}  // namespace

double matrix_trace(const ad::Array& A) {
  require_square(A, "trace");
  double s = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) s += A.at(i, i);
  return s;
}

double frobenius_norm(const ad::Array& A) {
  double s = 0.0;
  for (double v : A.data()) s += v * v;
  return std::sqrt(s);
}

SpectralNorm spectral_norm(const ad::Array& A, const PowerIterationOptions& opts) {
  if (A.rank() != 2 || A.size() == 0) throw InvalidArgument("spectral_norm: expected a matrix");
  if (opts.max_iterations < 1 || !(opts.tolerance > 0.0)) throw InvalidArgument("spectral_norm: bad options");
  if (!A.all_finite()) throw NumericInstability("spectral_norm: non-finite matrix");
  const RowMatrix m = Eigen::Map<const RowMatrix>(A.data().data(), static_cast<Eigen::Index>(A.rows()),
                                                  static_cast<Eigen::Index>(A.cols()));
  return power_iterate(m, opts);
}

namespace {

// Jacobians of all rows at once: result[s] is the [n x n] Jacobian at row s.
std::vector<RowMatrix> batch_jacobians(const VectorField& field, const ad::Array& z, const ad::Array& t) {
  const std::size_t rows = z.rows(), n = z.cols();
  ad::GradModeGuard on(true);
  const ad::Var zin = ad::parameter(z);
  const ad::Var f = field.evaluate(zin, ad::constant(t));
  std::vector<RowMatrix> jac(rows, RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> basis(rows * n, 0.0);
    for (std::size_t r = 0; r < rows; ++r) basis[r * n + i] = 1.0;
    const ad::Array g = ad::grad(ad::sum(f * ad::constant(ad::Array({rows, n}, std::move(basis)))), {zin})[0].value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < n; ++j) {
        jac[r](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g.at(r, j);
      }
    }
  }
  return jac;
}

}  // namespace

ad::Array jacobian(const VectorField& field, const ad::Array& z, double t) {
  if (z.rank() != 2 || z.rows() != 1 || z.cols() != field.dim()) {
    throw InvalidArgument("jacobian: expected a single [1 x n] state");
  }
  const RowMatrix j = batch_jacobians(field, z, ad::Array::full({1, 1}, t))[0];
  return ad::Array({z.cols(), z.cols()}, std::vector<double>(j.data(), j.data() + j.size()));
}

LipschitzEstimate lipschitz_at(const VectorField& field, const ad::Array& z, const ad::Array& t,
                               const PowerIterationOptions& opts) {
  if (z.rank() != 2 || z.cols() != field.dim() || t.rank() != 2 || t.cols() != 1 || t.rows() != z.rows()) {
    throw InvalidArgument("lipschitz_at: expected z [S x n] and t [S x 1]");
  }
  LipschitzEstimate out;
  constexpr std::size_t kChunk = 1024;
  const std::size_t n = z.cols();
  for (std::size_t begin = 0; begin < z.rows(); begin += kChunk) {
    const std::size_t end = std::min(z.rows(), begin + kChunk);
    ad::Array zc({end - begin, n}, std::vector<double>(z.data().begin() + begin * n, z.data().begin() + end * n));
    ad::Array tc({end - begin, 1}, std::vector<double>(t.data().begin() + begin, t.data().begin() + end));
    for (const RowMatrix& j : batch_jacobians(field, zc, tc)) {
      if (!j.allFinite()) throw NumericInstability("lipschitz_estimate: non-finite Jacobian");
      const SpectralNorm s = power_iterate(j, opts);
      out.value = std::max(out.value, s.value);
      out.all_converged = out.all_converged && s.converged;
    }
  }
  out.samples = z.rows();
  return out;
}

LipschitzEstimate lipschitz_estimate_detailed(const VectorField& field, std::size_t region_samples, Rng& rng,
                                              double region_scale, const PowerIterationOptions& opts) {
  if (region_samples < 1) throw InvalidArgument("lipschitz_estimate: region_samples must be >= 1");
  if (!(region_scale > 0.0)) throw InvalidArgument("lipschitz_estimate: region_scale must be positive");
  const std::size_t n = field.dim();
  std::normal_distribution<double> normal(0.0, region_scale);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> z(region_samples * n), t(region_samples);
  for (std::size_t s = 0; s < region_samples; ++s) {
    for (std::size_t j = 0; j < n; ++j) z[s * n + j] = normal(rng);
    t[s] = unit(rng);
  }
  return lipschitz_at(field, ad::Array({region_samples, n}, std::move(z)), ad::Array({region_samples, 1}, std::move(t)),
                      opts);
}

double lipschitz_estimate(const VectorField& field, std::size_t region_samples, Rng& rng) {
  return lipschitz_estimate_detailed(field, region_samples, rng).value;
}

double upper_bound_value(double z0_logprob, std::size_t n, double L_hat) {
  if (!(L_hat >= 0.0)) throw InvalidArgument("upper_bound_value: L_hat must be >= 0");
  return -z0_logprob + static_cast<double>(n) * L_hat;
}

}  // namespace cfre::flow
