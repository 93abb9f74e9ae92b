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

#include "cfre/model/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "cfre/errors.hpp"
#include "cfre/flow/density.hpp"
#include "cfre/flow/ot.hpp"
#include "cfre/model/density.hpp"
#include "cfre/model/losses.hpp"
#include "cfre/nn/adam.hpp"

namespace cfre::model {

void Dataset::validate() const {
  if (inputs.rank() != 2 || targets.rank() != 2) throw InvalidArgument("dataset: inputs and targets must be 2-D");
  if (inputs.rows() != targets.rows()) throw InvalidArgument("dataset: inputs and targets differ in length");
  if (K == 0 || D == 0 || targets.cols() != K * D) throw InvalidArgument("dataset: targets must be [N x K*D]");
  if (!inputs.all_finite() || !targets.all_finite()) throw InvalidArgument("dataset: non-finite values");
}

namespace {

ad::Array gather_rows(const ad::Array& a, const std::vector<std::size_t>& rows, std::size_t begin, std::size_t end) {
  const std::size_t c = a.cols();
  std::vector<double> out;
  out.reserve((end - begin) * c);
  const auto d = a.data();
  for (std::size_t i = begin; i < end; ++i) {
    if (rows[i] >= a.rows()) throw InvalidArgument("dataset: row index out of range");
    out.insert(out.end(), d.begin() + rows[i] * c, d.begin() + (rows[i] + 1) * c);
  }
  return ad::Array({end - begin, c}, std::move(out));
}

}  // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  return {gather_rows(inputs, rows, 0, rows.size()), gather_rows(targets, rows, 0, rows.size()), K, D};
}

Dataset Dataset::head(std::size_t n) const {
  std::vector<std::size_t> rows(std::min(n, size()));
  std::iota(rows.begin(), rows.end(), 0);
  return subset(rows);
}

std::string to_string(Trainer t) {
  switch (t) {
    case Trainer::cfre: return "cfre";
    case Trainer::explicit_nll: return "explicit_nll";
    case Trainer::laplace_only: return "laplace_only";
    case Trainer::gaussian_only: return "gaussian_only";
  }
  return "?";
}

Trainer parse_trainer(const std::string& s) {
  if (s == "cfre") return Trainer::cfre;
  if (s == "explicit_nll") return Trainer::explicit_nll;
  if (s == "laplace_only") return Trainer::laplace_only;
  if (s == "gaussian_only") return Trainer::gaussian_only;
  throw InvalidArgument("unknown trainer '" + s + "' (expected cfre, explicit_nll, laplace_only, gaussian_only)");
}

void CfreConfig::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("config: c must be a finite value >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("config: learning_rate must be > 0");
  if (epochs < 1) throw InvalidArgument("config: epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("config: batch_size must be >= 1");
  if (monitor_samples < 1 || monitor_ode_steps < 1) throw InvalidArgument("config: monitor settings must be >= 1");
  flow.validate();
  ode.validate();
}

std::vector<std::size_t> flow_widths(std::size_t D, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> w{D + 1};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(D);
  return w;
}

namespace {

// Stream ids of a seeded run.
enum Stream : std::uint64_t { kRegInit = 1, kBatches = 2, kFlowInit = 3, kFlowNoise = 4, kMonitor = 5 };

enum class Mode { heteroscedastic, decoupled, explicit_nll };

double finite_or_throw(double v, const char* what, int epoch, std::size_t step) {
  if (!std::isfinite(v)) {
    throw NumericInstability(std::string("training: non-finite ") + what + " at epoch " + std::to_string(epoch) +
                             ", step " + std::to_string(step));
  }
  return v;
}

std::vector<ad::Var*> slots(std::vector<ad::Var>& params) {
  std::vector<ad::Var*> out;
  for (auto& p : params) out.push_back(&p);
  return out;
}

TrainedCfre run_training(const Dataset& train_set, const Dataset& val, const CfreConfig& cfg, Mode mode,
                         BaseKind base, Trainer trainer) {
  cfg.validate();
  train_set.validate();
  val.validate();
  if (train_set.size() == 0 || val.size() == 0) throw InvalidArgument("training: empty train or validation split");
  if (val.K != train_set.K || val.D != train_set.D || val.input_dim() != train_set.input_dim()) {
    throw InvalidArgument("training: train and validation splits have different layouts");
  }
  const std::size_t K = train_set.K, D = train_set.D, N = train_set.size();

  Rng reg_init = make_stream(cfg.seed, kRegInit);
  Rng batches = make_stream(cfg.seed, kBatches);
  Rng flow_init = make_stream(cfg.seed, kFlowInit);
  Rng flow_noise = make_stream(cfg.seed, kFlowNoise);

  TrainedCfre out;
  out.regression = RegressionModel(train_set.input_dim(), K, D, cfg.hidden, reg_init);
  out.flow = flow::VectorFieldNet(flow_widths(D, cfg.flow_hidden), flow_init);
  out.base = base;
  out.trainer = trainer;
  out.flow_cfg = cfg.flow;
  const bool uses_flow = mode == Mode::explicit_nll || (mode == Mode::decoupled && cfg.c > 0.0);
  out.flow_active = uses_flow;

  flow::FlowConfig explicit_cfg = cfg.flow;
  explicit_cfg.trace_mode = flow::TraceMode::hutchinson;

  nn::AdamOptions opts;
  opts.learning_rate = cfg.learning_rate;
  nn::Adam reg_opt(opts), flow_opt(opts);
  const Dataset monitor = val.head(cfg.monitor_samples);
  const flow::OdeConfig monitor_ode{.steps = cfg.monitor_ode_steps};

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), batches);
    double sum_reg = 0.0, sum_flow = 0.0, sum_total = 0.0;
    std::size_t steps = 0;
    for (std::size_t begin = 0; begin < N; begin += cfg.batch_size, ++steps) {
      const std::size_t end = std::min(N, begin + cfg.batch_size);
      const std::size_t B = end - begin;
      const ad::Array xb = gather_rows(train_set.inputs, order, begin, end);
      const ad::Array yb = gather_rows(train_set.targets, order, begin, end);
      const Prediction pred = out.regression.forward(ad::constant(xb));

      if (mode == Mode::explicit_nll) {
        const ad::Var terms = flow::explicit_nll_terms(out.flow, ad::reshape(pred.mu, {B * K, D}),
                                                       ad::reshape(pred.sigma, {B * K, D}),
                                                       ad::Array({B * K, D}, yb.to_vector()), explicit_cfg, cfg.ode,
                                                       flow_noise);
        const ad::Var loss = ad::sum(terms) / static_cast<double>(B);
        const double lv = finite_or_throw(loss.item(), "explicit NLL", epoch, steps);
        double reg_value;
        {
          ad::NoGradGuard no_grad;
          reg_value = base_nll(base, ad::detach(pred.mu), ad::detach(pred.sigma), ad::constant(yb)).item();
        }
        std::vector<ad::Var> wrt = out.regression.parameters();
        wrt.insert(wrt.end(), out.flow.parameters().begin(), out.flow.parameters().end());
        const auto g = ad::grad(loss, wrt);
        const std::size_t nr = out.regression.parameters().size();
        reg_opt.step(slots(out.regression.parameters()), {g.values.begin(), g.values.begin() + nr});
        flow_opt.step(slots(out.flow.parameters()), {g.values.begin() + nr, g.values.end()});
        sum_reg += reg_value;
        sum_flow += lv;
        sum_total += lv;
        continue;
      }

      const ad::Var reg = base_nll(base, pred.mu, pred.sigma, ad::constant(yb));
      const double rv = finite_or_throw(reg.item(), "regression loss", epoch, steps);
      if (!uses_flow) {
        const auto g = ad::grad(reg, out.regression.parameters());
        reg_opt.step(slots(out.regression.parameters()), g.values);
        sum_reg += rv;
        sum_total += rv;
        continue;
      }

      // Flow sees standardized residuals through detached (mu, sigma).
      const ad::Array x_bar = standardize(yb, pred.mu.value(), pred.sigma.value());
      const flow::PathSample path =
          flow::sample_path(ad::Array({B * K, D}, x_bar.to_vector()), cfg.flow.sigma_min, flow_noise);
      const ad::Var per_joint = flow::flow_matching_terms(out.flow, path);
      const ad::Var per_sample = ad::mean(ad::reshape(per_joint, {B, K}), 1);
      const ad::Var total = cfre_loss(reg, per_sample, pred.sigma, cfg.c);
      const double fv = finite_or_throw(ad::mean(per_sample).item(), "flow loss", epoch, steps);
      const double tv = finite_or_throw(total.item(), "total loss", epoch, steps);
      std::vector<ad::Var> wrt = out.regression.parameters();
      wrt.insert(wrt.end(), out.flow.parameters().begin(), out.flow.parameters().end());
      const auto g = ad::grad(total, wrt);
      const std::size_t nr = out.regression.parameters().size();
      reg_opt.step(slots(out.regression.parameters()), {g.values.begin(), g.values.begin() + nr});
      flow_opt.step(slots(out.flow.parameters()), {g.values.begin() + nr, g.values.end()});
      sum_reg += rv;
      sum_flow += fv;
      sum_total += tv;
    }
    HistoryRow row;
    row.epoch = epoch;
    row.l_reg = sum_reg / static_cast<double>(steps);
    row.l_flow = sum_flow / static_cast<double>(steps);
    row.l_total = sum_total / static_cast<double>(steps);
    Rng monitor_rng = make_stream(cfg.seed, kMonitor);
    row.val_nll = mean_predictive_nll(out, monitor, monitor_ode, monitor_rng);
    out.history.push_back(row);
  }
  return out;
}

}  // namespace

TrainedCfre train_cfre(const Dataset& train_set, const Dataset& val, const CfreConfig& cfg) {
  return run_training(train_set, val, cfg, Mode::decoupled, cfg.base, Trainer::cfre);
}

TrainedCfre train_explicit_nll(const Dataset& train_set, const Dataset& val, const CfreConfig& cfg) {
  return run_training(train_set, val, cfg, Mode::explicit_nll, cfg.base, Trainer::explicit_nll);
}

TrainedCfre train_heteroscedastic(const Dataset& train_set, const Dataset& val, const CfreConfig& cfg,
                                  BaseKind base) {
  return run_training(train_set, val, cfg, Mode::heteroscedastic, base,
                      base == BaseKind::laplace ? Trainer::laplace_only : Trainer::gaussian_only);
}

TrainedCfre train(Trainer trainer, const Dataset& train_set, const Dataset& val, const CfreConfig& cfg) {
  switch (trainer) {
    case Trainer::cfre: return train_cfre(train_set, val, cfg);
    case Trainer::explicit_nll: return train_explicit_nll(train_set, val, cfg);
    case Trainer::laplace_only: return train_heteroscedastic(train_set, val, cfg, BaseKind::laplace);
    case Trainer::gaussian_only: return train_heteroscedastic(train_set, val, cfg, BaseKind::gaussian);
  }
  throw InvalidArgument("unknown trainer");
}

ad::Array predictive_nll(const TrainedCfre& model, const Dataset& data, const flow::OdeConfig& ode, Rng& rng) {
  data.validate();
  const PredictResult p = predict(model.regression, data.inputs);
  ad::Array lp;
  if (model.flow_active) {
    flow::FlowConfig exact = model.flow_cfg;
    exact.trace_mode = flow::TraceMode::exact;
    lp = joint_log_density(p.mu, p.sigma, data.targets, data.K, data.D, model.flow, exact, ode, rng);
  } else {
    lp = base_log_density(model.base, p.mu, p.sigma, data.targets);
  }
  std::vector<double> out(lp.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -lp[i];
  return ad::Array(lp.shape(), std::move(out));
}

double mean_predictive_nll(const TrainedCfre& model, const Dataset& data, const flow::OdeConfig& ode, Rng& rng) {
  const ad::Array nll = predictive_nll(model, data, ode, rng);
  double s = 0.0;
  for (double v : nll.data()) s += v;
  return s / static_cast<double>(nll.size());
}

void write_history_csv(const std::vector<HistoryRow>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << "epoch,l_reg,l_flow,l_total,val_nll\n" << std::setprecision(17);
  for (const HistoryRow& r : history) {
    out << r.epoch << ',' << r.l_reg << ',' << r.l_flow << ',' << r.l_total << ',' << r.val_nll << '\n';
  }
}

}  // namespace cfre::model
