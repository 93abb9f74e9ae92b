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

#include "cfre/model/losses.hpp"

#include <cmath>
#include <numbers>

#include "cfre/errors.hpp"

namespace cfre::model {

namespace {

void require_positive(const ad::Array& sigma, const char* who) {
  const auto s = sigma.data();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) {
      throw InvalidArgument(std::string(who) + ": sigma_hat must be positive (index " + std::to_string(i) + ")");
    }
  }
}

void require_same(const ad::Var& a, const ad::Var& b, const ad::Var& c, const char* who) {
  if (a.shape() != b.shape() || a.shape() != c.shape()) throw InvalidArgument(std::string(who) + ": shape mismatch");
}

}  // namespace

ad::Var laplace_terms(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target) {
  require_same(mu, sigma, target, "laplace_nll");
  require_positive(sigma.value(), "laplace_nll");
  return ad::log(sigma) + 0.5 * std::numbers::ln2 + ad::abs(target - mu) * std::numbers::sqrt2 / sigma;
}

ad::Var gaussian_terms(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target) {
  require_same(mu, sigma, target, "gaussian_nll");
  require_positive(sigma.value(), "gaussian_nll");
  return ad::log(sigma) + ad::square(target - mu) / (ad::square(sigma) * 2.0) +
         0.5 * std::log(2.0 * std::numbers::pi);
}

ad::Var base_terms(BaseKind kind, const ad::Var& mu, const ad::Var& sigma, const ad::Var& target) {
  return kind == BaseKind::laplace ? laplace_terms(mu, sigma, target) : gaussian_terms(mu, sigma, target);
}

ad::Var reduce_batch(const ad::Var& terms) {
  const double rows = static_cast<double>(terms.shape().front());
  return ad::sum(terms) / rows;
}

ad::Var laplace_nll(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target) {
  return reduce_batch(laplace_terms(mu, sigma, target));
}

ad::Var gaussian_nll(const ad::Var& mu, const ad::Var& sigma, const ad::Var& target) {
  return reduce_batch(gaussian_terms(mu, sigma, target));
}

ad::Var base_nll(BaseKind kind, const ad::Var& mu, const ad::Var& sigma, const ad::Var& target) {
  return reduce_batch(base_terms(kind, mu, sigma, target));
}

ad::Array standardize(const ad::Array& x, const ad::Array& mu, const ad::Array& sigma) {
  if (x.shape() != mu.shape() || x.shape() != sigma.shape()) throw InvalidArgument("standardize: shape mismatch");
  require_positive(sigma, "standardize");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (x[i] - mu[i]) / sigma[i];
  return ad::Array(x.shape(), std::move(out));
}

ad::Array destandardize(const ad::Array& x_bar, const ad::Array& mu, const ad::Array& sigma) {
  if (x_bar.shape() != mu.shape() || x_bar.shape() != sigma.shape()) {
    throw InvalidArgument("destandardize: shape mismatch");
  }
  require_positive(sigma, "destandardize");
  std::vector<double> out(x_bar.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x_bar[i] * sigma[i] + mu[i];
  return ad::Array(x_bar.shape(), std::move(out));
}

ad::Array lambda_weights(const ad::Array& sigma_hat, double c) {
  if (!(c >= 0.0)) throw InvalidArgument("cfre_loss: c must be >= 0");
  if (sigma_hat.rank() != 2) throw InvalidArgument("cfre_loss: sigma_hat must be [B x K*D]");
  const std::size_t B = sigma_hat.rows(), J = sigma_hat.cols();
  std::vector<double> lambda(B);
  for (std::size_t b = 0; b < B; ++b) {
    double mean = 0.0;
    for (std::size_t j = 0; j < J; ++j) mean += sigma_hat.at(b, j);
    lambda[b] = c * (1.0 - mean / static_cast<double>(J));
  }
  return ad::Array({B, 1}, std::move(lambda));
}

ad::Var cfre_loss(const ad::Var& reg_loss, const ad::Var& flow_loss, const ad::Var& sigma_hat, double c) {
  const ad::Array lambda = lambda_weights(sigma_hat.value(), c);
  if (c == 0.0) return reg_loss;
  const std::size_t B = lambda.rows();
  ad::Var per_sample = flow_loss;
  if (flow_loss.size() == 1 && B == 1) {
    per_sample = ad::reshape(flow_loss, {1, 1});
  } else if (flow_loss.shape() != ad::Shape{B, 1}) {
    throw InvalidArgument("cfre_loss: flow_loss " + ad::shape_string(flow_loss.shape()) + " is not [B x 1]");
  }
  return reg_loss + ad::mean(ad::constant(lambda) * per_sample);
}

}  // namespace cfre::model
