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

#include "cfre/bench/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "cfre/errors.hpp"
#include "cfre/flow/ode.hpp"
#include "cfre/model/checkpoint.hpp"
#include "cfre/model/density.hpp"

namespace cfre::bench {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kEvalStream = 6;
constexpr std::uint64_t kSampleStream = 7;

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidArgument(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

nlohmann::json task_json(const SyntheticTask& t) {
  return {{"kind", to_string(t.kind)}, {"input_dim", t.input_dim}, {"K", t.K},         {"D", t.D},
          {"samples", t.samples},      {"noise_scale", t.noise_scale}, {"seed", t.seed}};
}

nlohmann::json model_json(const model::CfreConfig& m) {
  return {{"c", m.c},
          {"base", model::to_string(m.base)},
          {"epochs", m.epochs},
          {"batch_size", m.batch_size},
          {"learning_rate", m.learning_rate},
          {"hidden", m.hidden},
          {"flow_hidden", m.flow_hidden},
          {"monitor_samples", m.monitor_samples},
          {"monitor_ode_steps", m.monitor_ode_steps},
          {"sigma_min", m.flow.sigma_min},
          {"trace_mode", flow::to_string(m.flow.trace_mode)},
          {"hutchinson_probes", m.flow.hutchinson_probes},
          {"probe_law", flow::to_string(m.flow.probe_law)},
          {"ode_steps", m.ode.steps}};
}

std::string number_label(double c) {
  std::ostringstream s;
  s << c;
  return s.str();
}

void write_json(const nlohmann::json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

void ExperimentConfig::validate() const {
  task.validate();
  model.validate();
  if (seeds.empty()) throw InvalidArgument("experiment: at least one seed is required");
  if (!c_sweep.empty() && trainer != model::Trainer::cfre) {
    throw InvalidArgument("experiment: c_sweep applies to the cfre trainer only");
  }
  for (double c : c_sweep) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("experiment: c_sweep values must be finite and >= 0");
  }
  if (eval_ode_steps < 1) throw InvalidArgument("experiment: eval_ode_steps must be >= 1");
  if (probe_joint >= task.K) throw InvalidArgument("experiment: probe_joint out of range");
  if (grid_steps < 2 || !(grid_hi > grid_lo)) throw InvalidArgument("experiment: need grid_steps >= 2 and grid_hi > grid_lo");
  if (random_rounds < 1) throw InvalidArgument("experiment: random_rounds must be >= 1");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  return {{"task", task_json(cfg.task)},
          {"model", model_json(cfg.model)},
          {"trainer", model::to_string(cfg.trainer)},
          {"c_sweep", cfg.c_sweep},
          {"out_dir", cfg.out_dir},
          {"seeds", cfg.seeds},
          {"eval_ode_steps", cfg.eval_ode_steps},
          {"probe_index", cfg.probe_index},
          {"probe_joint", cfg.probe_joint},
          {"grid_lo", cfg.grid_lo},
          {"grid_hi", cfg.grid_hi},
          {"grid_steps", cfg.grid_steps},
          {"random_rounds", cfg.random_rounds}};
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    reject_unknown_keys(j,
                        {"task", "model", "trainer", "c_sweep", "out_dir", "seeds", "eval_ode_steps", "probe_index",
                         "probe_joint", "grid_lo", "grid_hi", "grid_steps", "random_rounds"},
                        "config");
    if (j.contains("task")) {
      const auto& t = j.at("task");
      reject_unknown_keys(t, {"kind", "input_dim", "K", "D", "samples", "noise_scale", "seed"}, "config.task");
      if (t.contains("kind")) cfg.task.kind = parse_task_kind(t.at("kind").get<std::string>());
      read(t, "input_dim", cfg.task.input_dim);
      read(t, "K", cfg.task.K);
      read(t, "D", cfg.task.D);
      read(t, "samples", cfg.task.samples);
      read(t, "noise_scale", cfg.task.noise_scale);
      read(t, "seed", cfg.task.seed);
    }
    if (j.contains("model")) {
      const auto& m = j.at("model");
      reject_unknown_keys(m,
                          {"c", "base", "epochs", "batch_size", "learning_rate", "hidden", "flow_hidden",
                           "monitor_samples", "monitor_ode_steps", "sigma_min", "trace_mode", "hutchinson_probes",
                           "probe_law", "ode_steps"},
                          "config.model");
      read(m, "c", cfg.model.c);
      if (m.contains("base")) cfg.model.base = model::parse_base_kind(m.at("base").get<std::string>());
      read(m, "epochs", cfg.model.epochs);
      read(m, "batch_size", cfg.model.batch_size);
      read(m, "learning_rate", cfg.model.learning_rate);
      read(m, "hidden", cfg.model.hidden);
      read(m, "flow_hidden", cfg.model.flow_hidden);
      read(m, "monitor_samples", cfg.model.monitor_samples);
      read(m, "monitor_ode_steps", cfg.model.monitor_ode_steps);
      read(m, "sigma_min", cfg.model.flow.sigma_min);
      if (m.contains("trace_mode")) cfg.model.flow.trace_mode = flow::parse_trace_mode(m.at("trace_mode").get<std::string>());
      read(m, "hutchinson_probes", cfg.model.flow.hutchinson_probes);
      if (m.contains("probe_law")) cfg.model.flow.probe_law = flow::parse_probe_law(m.at("probe_law").get<std::string>());
      read(m, "ode_steps", cfg.model.ode.steps);
    }
    if (j.contains("trainer")) cfg.trainer = model::parse_trainer(j.at("trainer").get<std::string>());
    read(j, "c_sweep", cfg.c_sweep);
    read(j, "out_dir", cfg.out_dir);
    read(j, "seeds", cfg.seeds);
    read(j, "eval_ode_steps", cfg.eval_ode_steps);
    read(j, "probe_index", cfg.probe_index);
    read(j, "probe_joint", cfg.probe_joint);
    read(j, "grid_lo", cfg.grid_lo);
    read(j, "grid_hi", cfg.grid_hi);
    read(j, "grid_steps", cfg.grid_steps);
    read(j, "random_rounds", cfg.random_rounds);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config '" + path + "': " + e.what());
  }
  return experiment_from_json(j);
}

void save_experiment_config(const ExperimentConfig& cfg, const std::string& path) { write_json(to_json(cfg), path); }

std::vector<uq::PredictionRecord> prediction_records(const model::RegressionModel& m, const model::Dataset& data) {
  data.validate();
  const model::PredictResult p = model::predict(m, data.inputs);
  const std::size_t K = data.K, D = data.D;
  std::vector<uq::PredictionRecord> out;
  out.reserve(data.size() * K);
  for (std::size_t b = 0; b < data.size(); ++b) {
    for (std::size_t k = 0; k < K; ++k) {
      double sq = 0.0, s = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        const double r = data.targets.at(b, k * D + d) - p.mu.at(b, k * D + d);
        sq += r * r;
        s += p.sigma.at(b, k * D + d);
      }
      out.push_back({std::sqrt(sq), s / static_cast<double>(D), p.s_hat.at(b, k)});
    }
  }
  return out;
}

RunMetrics evaluate_model(const model::TrainedCfre& m, const model::Dataset& val, const model::Dataset& test,
                          const ExperimentConfig& cfg, std::uint64_t seed) {
  const flow::OdeConfig ode{.steps = cfg.eval_ode_steps};
  RunMetrics r;
  Rng rng = make_stream(seed, kEvalStream);
  r.val_nll = model::mean_predictive_nll(m, val, ode, rng);
  r.test_nll = model::mean_predictive_nll(m, test, ode, rng);
  const uq::UqReport uq = uq::evaluate(prediction_records(m.regression, test), uq::default_fractions(),
                                       cfg.random_rounds, seed);
  r.ause = uq.ause;
  r.aurg = uq.aurg;
  r.pcc = uq.pcc;
  r.normalized = uq.model.normalized;
  if (!std::isfinite(r.val_nll) || !std::isfinite(r.test_nll)) throw NumericInstability("evaluation: non-finite NLL");
  return r;
}

flow::DensityGrid predictive_density_grid(const model::TrainedCfre& m, const ad::Array& input, std::size_t joint,
                                          double lo, double hi, int steps, const flow::OdeConfig& ode, Rng& rng) {
  const std::size_t D = m.regression.D();
  if (D != 2) throw InvalidArgument("density grid: needs D = 2");
  if (joint >= m.regression.K()) throw InvalidArgument("density grid: joint out of range");
  if (input.rank() != 2 || input.rows() != 1) throw InvalidArgument("density grid: input must be one row");
  const model::PredictResult p = model::predict(m.regression, input);
  const double mx = p.mu.at(0, joint * D), my = p.mu.at(0, joint * D + 1);
  const double sx = p.sigma.at(0, joint * D), sy = p.sigma.at(0, joint * D + 1);
  const std::vector<double> axis = flow::grid_axis(lo, hi, steps);
  flow::DensityGrid grid;
  grid.spacing_x = grid.spacing_y = (hi - lo) / (steps - 1);
  std::vector<double> pts, mus, sigmas;
  for (double oy : axis) {
    for (double ox : axis) {
      grid.x.push_back(mx + ox);
      grid.y.push_back(my + oy);
      pts.insert(pts.end(), {mx + ox, my + oy});
      mus.insert(mus.end(), {mx, my});
      sigmas.insert(sigmas.end(), {sx, sy});
    }
  }
  const std::size_t n = grid.x.size();
  const ad::Array x({n, 2}, std::move(pts)), mu({n, 2}, std::move(mus)), sigma({n, 2}, std::move(sigmas));
  ad::Array lp;
  if (m.flow_active) {
    flow::FlowConfig exact = m.flow_cfg;
    exact.trace_mode = flow::TraceMode::exact;
    lp = model::joint_log_density(mu, sigma, x, 1, 2, m.flow, exact, ode, rng);
  } else {
    lp = model::base_log_density(m.base, mu, sigma, x);
  }
  grid.log_prob = lp.to_vector();
  return grid;
}

ad::Array sample_predictive(const model::TrainedCfre& m, const ad::Array& input, std::size_t joint,
                            std::size_t count, const flow::OdeConfig& ode, Rng& rng) {
  const std::size_t D = m.regression.D();
  if (joint >= m.regression.K()) throw InvalidArgument("samples: joint out of range");
  const model::PredictResult p = model::predict(m.regression, input);
  ad::Array x_bar;
  if (m.flow_active) {
    x_bar = flow::sample_flow(m.flow, count, ode, rng);
  } else {
    std::vector<double> e(count * D);
    if (m.base == model::BaseKind::gaussian) {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& v : e) v = normal(rng);
    } else {
      // Unit-variance Laplace, matching the loss parameterization.
      std::exponential_distribution<double> expo(1.0);
      std::bernoulli_distribution coin(0.5);
      for (auto& v : e) v = (coin(rng) ? 1.0 : -1.0) * expo(rng) / std::sqrt(2.0);
    }
    x_bar = ad::Array({count, D}, std::move(e));
  }
  std::vector<double> out(count * D);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t d = 0; d < D; ++d) {
      out[i * D + d] = p.mu.at(0, joint * D + d) + p.sigma.at(0, joint * D + d) * x_bar.at(i, d);
    }
  }
  return ad::Array({count, D}, std::move(out));
}

SingleRun train_and_evaluate(const ExperimentConfig& cfg, const Split& split, model::Trainer trainer, double c,
                             std::uint64_t seed) {
  model::CfreConfig m = cfg.model;
  m.c = c;
  m.seed = seed;
  SingleRun r;
  r.model = model::train(trainer, split.train, split.val, m);
  r.metrics = evaluate_model(r.model, split.val, split.test, cfg, seed);
  return r;
}

std::string run_label(model::Trainer trainer, double c, bool sweep) {
  if (trainer == model::Trainer::cfre || sweep) return model::to_string(trainer) + "_c" + number_label(c);
  return model::to_string(trainer);
}

nlohmann::json metrics_to_json(const RunReport& r) {
  return {{"label", r.label},
          {"trainer", model::to_string(r.trainer)},
          {"c", r.c},
          {"seed", r.seed},
          {"val_nll", r.metrics.val_nll},
          {"test_nll", r.metrics.test_nll},
          {"ause", r.metrics.ause},
          {"aurg", r.metrics.aurg},
          {"pcc", r.metrics.pcc},
          {"normalized", r.metrics.normalized}};
}

void write_summary_csv(const std::vector<RunReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << "label,trainer,c,seed,val_nll,test_nll,ause,aurg,pcc\n" << std::setprecision(17);
  for (const auto& r : reports) {
    out << r.label << ',' << model::to_string(r.trainer) << ',' << r.c << ',' << r.seed << ',' << r.metrics.val_nll
        << ',' << r.metrics.test_nll << ',' << r.metrics.ause << ',' << r.metrics.aurg << ',' << r.metrics.pcc << '\n';
  }
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

void write_manifest(const std::string& dir, const nlohmann::json& config) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel != "manifest.json") files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : files) {
    const fs::path p = fs::path(dir) / f;
    list.push_back({{"path", f}, {"sha256", sha256_file(p.string())}, {"bytes", fs::file_size(p)}});
  }
  write_json({{"config", config}, {"files", list}}, fs::path(dir) / "manifest.json");
}

std::vector<RunReport> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path root(cfg.out_dir);
  fs::create_directories(root);
  save_experiment_config(cfg, (root / "config.json").string());
  const Split split = split_dataset(generate(cfg.task), cfg.task.seed);
  if (cfg.probe_index >= split.test.size()) throw InvalidArgument("experiment: probe_index beyond the test split");
  const ad::Array probe = split.test.subset({cfg.probe_index}).inputs;

  const bool sweep = !cfg.c_sweep.empty();
  const std::vector<double> cs = sweep ? cfg.c_sweep : std::vector<double>{cfg.model.c};
  std::vector<RunReport> reports;
  for (double c : cs) {
    for (std::uint64_t seed : cfg.seeds) {
      RunReport rep;
      rep.trainer = cfg.trainer;
      rep.c = c;
      rep.seed = seed;
      rep.label = run_label(cfg.trainer, c, sweep);
      const fs::path dir = root / rep.label / ("seed_" + std::to_string(seed));
      fs::create_directories(dir);
      rep.run_dir = dir.string();
      const auto start = std::chrono::steady_clock::now();
      SingleRun run;
      try {
        run = train_and_evaluate(cfg, split, cfg.trainer, c, seed);
      } catch (const NumericInstability& e) {
        write_json({{"status", "aborted"}, {"error", e.what()}}, dir / "status.json");
        write_summary_csv(reports, (root / "summary.csv").string());
        write_manifest(root.string(), to_json(cfg));
        throw;
      }
      rep.metrics = run.metrics;
      rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rep.checkpoint_path = (dir / "checkpoint.json").string();
      rep.history_path = (dir / "history.csv").string();
      rep.metrics_path = (dir / "metrics.json").string();
      model::save_checkpoint(run.model, rep.checkpoint_path);
      model::write_history_csv(run.model.history, rep.history_path);
      write_json(metrics_to_json(rep), rep.metrics_path);
      const auto records = prediction_records(run.model.regression, split.test);
      uq::write_records_csv(records, (dir / "predictions.csv").string());
      const uq::UqReport uq = uq::evaluate(records, uq::default_fractions(), cfg.random_rounds, seed);
      uq::write_curve_csv(uq.model, (dir / "sparsification_model.csv").string());
      uq::write_curve_csv(uq.oracle, (dir / "sparsification_oracle.csv").string());
      uq::write_curve_csv(uq.random, (dir / "sparsification_random.csv").string());
      if (cfg.task.D == 2) {
        Rng rng = make_stream(seed, kSampleStream);
        const flow::DensityGrid grid =
            predictive_density_grid(run.model, probe, cfg.probe_joint, cfg.grid_lo, cfg.grid_hi, cfg.grid_steps,
                                    flow::OdeConfig{.steps = cfg.eval_ode_steps}, rng);
        flow::write_density_grid_csv(grid, (dir / "density_grid.csv").string());
      }
      reports.push_back(rep);
    }
  }
  write_summary_csv(reports, (root / "summary.csv").string());
  write_manifest(root.string(), to_json(cfg));
  return reports;
}

}  // namespace cfre::bench
