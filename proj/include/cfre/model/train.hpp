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

#include <cstdint>
#include <string>
#include <vector>

#include "cfre/autodiff.hpp"
#include "cfre/flow/config.hpp"
#include "cfre/flow/field.hpp"
#include "cfre/model/regression.hpp"

namespace cfre::model {

// Inputs [N x input_dim] and targets [N x K*D] (joint-major columns).
struct Dataset {
  ad::Array inputs;
  ad::Array targets;
  std::size_t K = 0;
  std::size_t D = 0;

  std::size_t size() const { return inputs.rank() == 2 ? inputs.rows() : 0; }
  std::size_t input_dim() const { return inputs.cols(); }
  void validate() const;
  Dataset subset(const std::vector<std::size_t>& rows) const;
  Dataset head(std::size_t n) const;
};

enum class Trainer { cfre, explicit_nll, laplace_only, gaussian_only };

std::string to_string(Trainer t);
Trainer parse_trainer(const std::string& s);

struct CfreConfig {
  double c = 0.1;
  BaseKind base = BaseKind::laplace;
  flow::FlowConfig flow;
  flow::OdeConfig ode;
  int epochs = 120;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden = {64, 64};       // regression feature net
  std::vector<std::size_t> flow_hidden = {64, 64};  // vector field
  // Per-epoch val_nll in the history is a monitor on the first
  // monitor_samples validation rows with a coarser ODE grid.
  std::size_t monitor_samples = 128;
  int monitor_ode_steps = 8;

  void validate() const;
  bool operator==(const CfreConfig&) const = default;
};

struct HistoryRow {
  int epoch = 0;
  double l_reg = 0.0;
  double l_flow = 0.0;
  double l_total = 0.0;
  double val_nll = 0.0;
};

struct TrainedCfre {
  RegressionModel regression;
  flow::VectorFieldNet flow;
  BaseKind base = BaseKind::laplace;
  // False when the flow never received a training signal (laplace_only,
  // gaussian_only, cfre with c = 0): the predictive density is then the base
  // distribution, i.e. plain heteroscedastic regression.
  bool flow_active = false;
  flow::FlowConfig flow_cfg;
  Trainer trainer = Trainer::cfre;
  std::vector<HistoryRow> history;
};

// Decoupled training: base NLL on (mu_hat, sigma_hat) plus the
// confidence-weighted flow-matching loss on detached standardized residuals.
TrainedCfre train_cfre(const Dataset& train, const Dataset& val, const CfreConfig& cfg);

// End-to-end explicit NLL through the ODE unroll with Hutchinson traces
// (cfg.flow.hutchinson_probes probes, cfg.flow.probe_law). History columns:
// l_reg is the base NLL of the current predictions (diagnostic only),
// l_flow = l_total = the optimized NLL.
TrainedCfre train_explicit_nll(const Dataset& train, const Dataset& val, const CfreConfig& cfg);

// Heteroscedastic regression with the given base distribution only.
TrainedCfre train_heteroscedastic(const Dataset& train, const Dataset& val, const CfreConfig& cfg, BaseKind base);

TrainedCfre train(Trainer trainer, const Dataset& train, const Dataset& val, const CfreConfig& cfg);

// Widths of the default vector field for D-dimensional residuals.
std::vector<std::size_t> flow_widths(std::size_t D, const std::vector<std::size_t>& hidden);

// -log p(x | input) per sample, [N x 1], under the model's predictive
// density (flow-based when flow_active, base otherwise). Exact traces.
ad::Array predictive_nll(const TrainedCfre& model, const Dataset& data, const flow::OdeConfig& ode, Rng& rng);
double mean_predictive_nll(const TrainedCfre& model, const Dataset& data, const flow::OdeConfig& ode, Rng& rng);

// CSV `epoch,l_reg,l_flow,l_total,val_nll`.
void write_history_csv(const std::vector<HistoryRow>& history, const std::string& path);

}  // namespace cfre::model
