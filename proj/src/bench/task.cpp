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

#include "cfre/bench/task.hpp"

#include <cmath>

#include "cfre/errors.hpp"

namespace cfre::bench {

namespace {

constexpr std::uint64_t kInputStream = 101;
constexpr std::uint64_t kResidualStream = 102;
constexpr std::uint64_t kFunctionStream = 103;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::aniso_gaussian: return "aniso_gaussian";
    case TaskKind::aniso_laplace: return "aniso_laplace";
    case TaskKind::heavy_tail_mixture: return "heavy_tail_mixture";
    case TaskKind::skewed: return "skewed";
    case TaskKind::bimodal: return "bimodal";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& s) {
  for (TaskKind k : {TaskKind::aniso_gaussian, TaskKind::aniso_laplace, TaskKind::heavy_tail_mixture,
                     TaskKind::skewed, TaskKind::bimodal}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidArgument("unknown task kind '" + s +
                        "' (expected aniso_gaussian, aniso_laplace, heavy_tail_mixture, skewed, bimodal)");
}

void SyntheticTask::validate() const {
  if (input_dim < 1 || K < 1 || D < 1) throw InvalidArgument("task: input_dim, K and D must be >= 1");
  if (samples < 1) throw InvalidArgument("task: samples must be >= 1");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) throw InvalidArgument("task: noise_scale must be >= 0");
}

double axis_variance(std::size_t d) { return d % 2 == 0 ? 1.0 : 2.0; }

ad::Array draw_residuals(TaskKind kind, std::size_t n, std::size_t D, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::gamma_distribution<double> gamma2(2.0, 1.0);
  std::bernoulli_distribution coin(0.5), wide(0.1);
  std::vector<double> out(n * D);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < D; ++d) {
      double e = 0.0;  // unit variance
      switch (kind) {
        case TaskKind::aniso_gaussian: e = normal(rng); break;
        case TaskKind::aniso_laplace: e = (coin(rng) ? 1.0 : -1.0) * expo(rng) / std::sqrt(2.0); break;
        case TaskKind::heavy_tail_mixture:
          // 0.9 N(0, 1) + 0.1 N(0, 9), left unnormalized so the components
          // keep the stated covariances.
          e = normal(rng) * (wide(rng) ? 3.0 : 1.0);
          break;
        case TaskKind::skewed: e = (gamma2(rng) - 2.0) / std::sqrt(2.0); break;
        case TaskKind::bimodal: e = (coin(rng) ? 0.8 : -0.8) + 0.6 * normal(rng); break;
      }
      out[i * D + d] = e * std::sqrt(axis_variance(d));
    }
  }
  return ad::Array({n, D}, std::move(out));
}

ad::Array target_function(const SyntheticTask& task, const ad::Array& inputs) {
  const std::size_t n = inputs.rows(), in = task.input_dim, out = task.K * task.D;
  if (inputs.cols() != in) throw InvalidArgument("target_function: input width mismatch");
  Rng rng = make_stream(task.seed, kFunctionStream);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(in)));
  std::vector<double> w(out * in), u(out * in), offset(out);
  for (auto& v : w) v = 1.5 * normal(rng);
  for (auto& v : u) v = 0.5 * normal(rng);
  for (std::size_t c = 0; c < out; ++c) offset[c] = 0.25 * static_cast<double>(c);
  std::vector<double> y(n * out);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < out; ++c) {
      double a = 0.0, b = 0.0;
      for (std::size_t j = 0; j < in; ++j) {
        a += w[c * in + j] * inputs.at(i, j);
        b += u[c * in + j] * inputs.at(i, j);
      }
      y[i * out + c] = std::sin(a) + b + offset[c];
    }
  }
  return ad::Array({n, out}, std::move(y));
}

ad::Array noise_scale_field(const SyntheticTask& task, const ad::Array& inputs) {
  const std::size_t n = inputs.rows();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = task.noise_scale * (0.05 + 0.1 / (1.0 + std::exp(-2.0 * inputs.at(i, 0))));
  }
  return ad::Array({n, 1}, std::move(s));
}

model::Dataset generate(const SyntheticTask& task, std::size_t n) {
  task.validate();
  if (n < 1) throw InvalidArgument("generate: n must be >= 1");
  Rng input_rng = make_stream(task.seed, kInputStream);
  Rng residual_rng = make_stream(task.seed, kResidualStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n * task.input_dim);
  for (auto& v : x) v = normal(input_rng);
  model::Dataset d;
  d.inputs = ad::Array({n, task.input_dim}, std::move(x));
  d.K = task.K;
  d.D = task.D;
  std::vector<double> y = target_function(task, d.inputs).to_vector();
  const ad::Array scale = noise_scale_field(task, d.inputs);
  const ad::Array res = draw_residuals(task.kind, n * task.K, task.D, residual_rng);
  const std::size_t out = task.K * task.D;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < out; ++c) y[i * out + c] += scale[i] * res[i * out + c];
  }
  d.targets = ad::Array({n, out}, std::move(y));
  return d;
}

Split split_dataset(const model::Dataset& data, std::uint64_t seed) {
  std::vector<std::size_t> tr, va, te;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double u = static_cast<double>(splitmix64(seed ^ splitmix64(i)) >> 11) * 0x1.0p-53;
    (u < 0.8 ? tr : u < 0.9 ? va : te).push_back(i);
  }
  if (tr.empty() || va.empty() || te.empty()) throw InvalidArgument("split: dataset too small for an 80/10/10 split");
  return {data.subset(tr), data.subset(va), data.subset(te)};
}

}  // namespace cfre::bench
