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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cfre/errors.hpp"
#include "random_arrays.hpp"

namespace cfre::flow {
namespace {

using ad::Array;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double svd_norm(const Array& A) {
  const RowMat m = Eigen::Map<const RowMat>(A.data().data(), A.rows(), A.cols());
  return Eigen::JacobiSVD<RowMat>(m).singularValues()(0);
}

TEST(MatrixNormTest, HandValues) {
  const Array A = Array::matrix({{3.0, 0.0}, {4.0, -5.0}});
  EXPECT_DOUBLE_EQ(matrix_trace(A), -2.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(A), std::sqrt(50.0));
  EXPECT_NEAR(spectral_norm(A).value, svd_norm(A), 1e-9);
  EXPECT_THROW(matrix_trace(Array::zeros({2, 3})), InvalidArgument);
}

TEST(MatrixNormTest, ZeroMatrix) {
  const SpectralNorm s = spectral_norm(Array::zeros({3, 3}));
  EXPECT_EQ(s.value, 0.0);
  EXPECT_TRUE(s.converged);
}

TEST(MatrixNormTest, NonConvergenceReportsBestIterate) {
  // Two equal-magnitude singular values with a rotation: the estimate is
  // still the right value even though the vector does not settle.
  const Array A = Array::matrix({{1.0, 0.0}, {0.0, 1.0 - 1e-7}});
  const SpectralNorm s = spectral_norm(A, {.max_iterations = 3, .tolerance = 1e-300});
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 3);
  EXPECT_LE(s.value, 1.0 + 1e-12);
  EXPECT_GT(s.value, 0.99);
}

TEST(MatrixNormTest, PowerIterationMatchesSvd) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const Array A = testing::random_normal({n, n}, rng);
    const SpectralNorm s = spectral_norm(A, {.max_iterations = 2000, .tolerance = 1e-14});
    EXPECT_NEAR(s.value, svd_norm(A), 1e-6 * svd_norm(A)) << trial;
  }
}

// Trace <= sqrt(n) ||A||_F and ||A||_F <= sqrt(n) ||A||_2 on 1000 random matrices.
TEST(MatrixNormTest, TraceAndNormInequalities) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> dim(2, 32);
  std::uniform_real_distribution<double> scale(0.01, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = dim(rng);
    Array A = testing::random_normal({n, n}, rng, scale(rng));
    if (trial % 4 == 0) {
      // Positive-diagonal matrices push the trace towards its bound.
      std::vector<double> d(A.data().begin(), A.data().end());
      for (std::size_t i = 0; i < n; ++i) d[i * n + i] = std::abs(d[i * n + i]) + 5.0;
      A = Array({n, n}, d);
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const double fro = frobenius_norm(A);
    EXPECT_LE(matrix_trace(A), root_n * fro + 1e-9) << trial;
    EXPECT_LE(fro, root_n * spectral_norm(A).value + 1e-9) << trial;
  }
  // Equality case: A = I.
  std::vector<double> eye(16, 0.0);
  for (int i = 0; i < 4; ++i) eye[i * 5] = 1.0;
  const Array I({4, 4}, eye);
  EXPECT_NEAR(matrix_trace(I), 2.0 * frobenius_norm(I), 1e-12);
  EXPECT_NEAR(frobenius_norm(I), 2.0 * spectral_norm(I).value, 1e-12);
}

TEST(LipschitzTest, ScaledIdentity) {
  FunctionField f(3, [](const ad::Var& z, const ad::Var&) { return z * 3.0; });
  std::mt19937_64 rng(3);
  EXPECT_NEAR(lipschitz_estimate(f, 20, rng), 3.0, 1e-12);
}

TEST(LipschitzTest, ConstantField) {
  FunctionField f(2, [](const ad::Var& z, const ad::Var& t) {
    return ad::expand(t, z.shape()) * 0.0 + 1.5;
  });
  std::mt19937_64 rng(4);
  EXPECT_EQ(lipschitz_estimate(f, 20, rng), 0.0);
}

TEST(LipschitzTest, BelowLayerCompositionBound) {
  std::mt19937_64 rng(5);
  for (std::size_t n : {2u, 4u, 8u}) {
    VectorFieldNet net(VectorFieldNet::default_widths(n), rng);
    double bound = 1.0;
    for (std::size_t l = 0; l < net.mlp().num_layers(); ++l) bound *= svd_norm(net.mlp().weight(l));
    const LipschitzEstimate est = lipschitz_estimate_detailed(net, 200, rng);
    EXPECT_GT(est.value, 0.0);
    EXPECT_LE(est.value, bound) << "n=" << n;
    EXPECT_EQ(est.samples, 200u);
  }
}

TEST(LipschitzTest, JacobianMatchesSvdAtPoint) {
  std::mt19937_64 rng(6);
  VectorFieldNet net(VectorFieldNet::default_widths(3), rng);
  const Array z = testing::random_normal({1, 3}, rng);
  const LipschitzEstimate est =
      lipschitz_at(net, z, Array::full({1, 1}, 0.4), {.max_iterations = 500, .tolerance = 1e-14});
  EXPECT_NEAR(est.value, svd_norm(jacobian(net, z, 0.4)), 1e-8);
}

TEST(LipschitzTest, RejectsZeroSamples) {
  std::mt19937_64 rng(7);
  EXPECT_THROW(lipschitz_estimate(zero_field(2), 0, rng), InvalidArgument);
}

TEST(UpperBoundTest, Arithmetic) {
  EXPECT_DOUBLE_EQ(upper_bound_value(-3.25, 4, 0.0), 3.25);
  EXPECT_DOUBLE_EQ(upper_bound_value(-2.0, 2, 1.5), 5.0);
  EXPECT_THROW(upper_bound_value(-2.0, 2, -0.1), InvalidArgument);
}

}  // namespace
}  // namespace cfre::flow
