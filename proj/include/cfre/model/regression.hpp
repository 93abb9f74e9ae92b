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

#include <string>
#include <vector>

#include "cfre/autodiff.hpp"
#include "cfre/nn/mlp.hpp"
#include "cfre/rng.hpp"

namespace cfre::model {

enum class BaseKind { gaussian, laplace };

std::string to_string(BaseKind kind);
BaseKind parse_base_kind(const std::string& s);

// Lower bound of the squashed scale: sigma_hat = floor + (1 - floor) * sigmoid(raw).
inline constexpr double kSigmaFloor = 1e-4;

// Columns are joint-major: column k * D + d is axis d of joint k.
struct Prediction {
  ad::Var mu;     // [B x K*D]
  ad::Var sigma;  // [B x K*D], in (0, 1]
};

struct Confidence {
  ad::Array joint;     // s_hat = 1 - axis-mean sigma_hat, [B x K]
  ad::Array instance;  // c_hat = mean of s_hat over joints, [B x 1]
};

Confidence confidence_from_sigma(const ad::Array& sigma, std::size_t K, std::size_t D);

// Feature MLP over task inputs with one linear head emitting K*D means and
// K*D raw scales.
class RegressionModel {
 public:
  RegressionModel() = default;
  RegressionModel(std::size_t input_dim, std::size_t K, std::size_t D, const std::vector<std::size_t>& hidden,
                  Rng& rng);
  RegressionModel(std::vector<std::size_t> widths, std::size_t K, std::size_t D, std::vector<ad::Array> params);

  Prediction forward(const ad::Var& input) const;

  std::size_t K() const { return K_; }
  std::size_t D() const { return D_; }
  std::size_t input_dim() const { return mlp_.widths().front(); }
  const std::vector<std::size_t>& widths() const { return mlp_.widths(); }
  std::vector<ad::Var>& parameters() { return mlp_.parameters(); }
  const std::vector<ad::Var>& parameters() const { return mlp_.parameters(); }

 private:
  nn::Mlp mlp_;
  std::size_t K_ = 0;
  std::size_t D_ = 0;
};

struct PredictResult {
  ad::Array mu;
  ad::Array sigma;
  ad::Array s_hat;  // [B x K]
  ad::Array c_hat;  // [B x 1]
};

// Inference without a graph. Rejects non-finite inputs.
PredictResult predict(const RegressionModel& model, const ad::Array& input);

}  // namespace cfre::model
