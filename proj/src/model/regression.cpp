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

#include "cfre/model/regression.hpp"

#include <algorithm>

#include "cfre/errors.hpp"

namespace cfre::model {

std::string to_string(BaseKind kind) { return kind == BaseKind::gaussian ? "gaussian" : "laplace"; }

BaseKind parse_base_kind(const std::string& s) {
  if (s == "gaussian") return BaseKind::gaussian;
  if (s == "laplace") return BaseKind::laplace;
  throw InvalidArgument("unknown base distribution '" + s + "' (expected gaussian or laplace)");
}

Confidence confidence_from_sigma(const ad::Array& sigma, std::size_t K, std::size_t D) {
  if (sigma.rank() != 2 || sigma.cols() != K * D) {
    throw InvalidArgument("confidence: sigma " + ad::shape_string(sigma.shape()) + " is not [B x K*D]");
  }
  const std::size_t B = sigma.rows();
  std::vector<double> joint(B * K), instance(B);
  for (std::size_t b = 0; b < B; ++b) {
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      double mean = 0.0;
      for (std::size_t d = 0; d < D; ++d) mean += sigma.at(b, k * D + d);
      mean /= static_cast<double>(D);
      joint[b * K + k] = std::clamp(1.0 - mean, 0.0, 1.0);
      total += joint[b * K + k];
    }
    instance[b] = total / static_cast<double>(K);
  }
  return {ad::Array({B, K}, std::move(joint)), ad::Array({B, 1}, std::move(instance))};
}

namespace {

std::vector<std::size_t> head_widths(std::size_t input_dim, std::size_t K, std::size_t D,
                                     const std::vector<std::size_t>& hidden) {
  if (input_dim == 0 || K == 0 || D == 0) throw InvalidArgument("RegressionModel: dimensions must be positive");
  std::vector<std::size_t> w{input_dim};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(2 * K * D);
  return w;
}

}  // namespace

RegressionModel::RegressionModel(std::size_t input_dim, std::size_t K, std::size_t D,
                                 const std::vector<std::size_t>& hidden, Rng& rng)
    : mlp_(head_widths(input_dim, K, D, hidden), rng), K_(K), D_(D) {}

RegressionModel::RegressionModel(std::vector<std::size_t> widths, std::size_t K, std::size_t D,
                                 std::vector<ad::Array> params)
    : mlp_(std::move(widths), std::move(params)), K_(K), D_(D) {
  if (mlp_.widths().back() != 2 * K * D) {
    throw InvalidArgument("RegressionModel: output width must be 2*K*D = " + std::to_string(2 * K * D));
  }
}

Prediction RegressionModel::forward(const ad::Var& input) const {
  const ad::Var out = mlp_.forward(input);
  const std::size_t n = K_ * D_;
  const ad::Var raw = ad::slice_cols(out, n, 2 * n);
  return {ad::slice_cols(out, 0, n), ad::sigmoid(raw) * (1.0 - kSigmaFloor) + kSigmaFloor};
}

PredictResult predict(const RegressionModel& model, const ad::Array& input) {
  if (!input.all_finite()) throw InvalidArgument("predict: non-finite input");
  ad::NoGradGuard no_grad;
  const Prediction p = model.forward(ad::constant(input));
  Confidence c = confidence_from_sigma(p.sigma.value(), model.K(), model.D());
  return {p.mu.value(), p.sigma.value(), std::move(c.joint), std::move(c.instance)};
}

}  // namespace cfre::model
