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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfre/bench/task.hpp"
#include "cfre/flow/density.hpp"
#include "cfre/model/train.hpp"
#include "cfre/uq/metrics.hpp"

namespace cfre::bench {

struct ExperimentConfig {
  SyntheticTask task;
  model::CfreConfig model;
  model::Trainer trainer = model::Trainer::cfre;
  // When non-empty, one run per value of c (overrides model.c).
  std::vector<double> c_sweep;
  std::string out_dir = "runs";
  // Model seeds; the data always come from task.seed.
  std::vector<std::uint64_t> seeds = {0};
  // Held-out NLL uses exact traces on this RK4 grid.
  int eval_ode_steps = 32;
  // Density grid around the prediction for one test input.
  std::size_t probe_index = 0;
  std::size_t probe_joint = 0;
  double grid_lo = -1.0;
  double grid_hi = 1.0;
  int grid_steps = 81;
  int random_rounds = 100;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const ExperimentConfig& cfg, const std::string& path);

struct RunMetrics {
  double val_nll = 0.0;
  double test_nll = 0.0;
  double ause = 0.0;
  double aurg = 0.0;
  double pcc = 0.0;
  bool normalized = true;
};

struct RunReport {
  std::string label;
  model::Trainer trainer = model::Trainer::cfre;
  double c = 0.0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::string run_dir;
  std::string checkpoint_path;
  std::string history_path;
  std::string metrics_path;
  double seconds = 0.0;  // wall clock; reported, never written to disk
};

// Per-joint records on a dataset: error is the Euclidean distance between
// predicted and true joint, uncertainty the axis-mean sigma_hat, confidence
// the joint confidence.
std::vector<uq::PredictionRecord> prediction_records(const model::RegressionModel& model,
                                                     const model::Dataset& data);

// Held-out metrics of a trained model.
RunMetrics evaluate_model(const model::TrainedCfre& model, const model::Dataset& val, const model::Dataset& test,
                          const ExperimentConfig& cfg, std::uint64_t seed);

// Predictive log-density of one joint over a grid of offsets [lo, hi]^2 (in
// target units) around the predicted joint position; x, y are absolute.
flow::DensityGrid predictive_density_grid(const model::TrainedCfre& model, const ad::Array& input, std::size_t joint,
                                          double lo, double hi, int steps, const flow::OdeConfig& ode, Rng& rng);

// Draws from the predictive distribution of one joint, [count x D].
ad::Array sample_predictive(const model::TrainedCfre& model, const ad::Array& input, std::size_t joint,
                            std::size_t count, const flow::OdeConfig& ode, Rng& rng);

// Trains one configuration in memory (no files).
struct SingleRun {
  model::TrainedCfre model;
  RunMetrics metrics;
};
SingleRun train_and_evaluate(const ExperimentConfig& cfg, const Split& split, model::Trainer trainer, double c,
                             std::uint64_t seed);

// Directory label of one configuration, e.g. "cfre_c0.1" or "laplace_only".
std::string run_label(model::Trainer trainer, double c, bool sweep);

// Full experiment: one run per (c, seed) under cfg.out_dir/<label>/seed_<s>/
// with checkpoint.json, history.csv, metrics.json, predictions.csv,
// sparsification.csv and density_grid.csv; plus config.json, summary.csv and
// manifest.json (every file with its SHA-256) at the top level. A training
// abort writes status.json {"status": "aborted"} into the run directory, the
// manifest, and rethrows.
std::vector<RunReport> run_experiment(const ExperimentConfig& cfg);

nlohmann::json metrics_to_json(const RunReport& report);
void write_summary_csv(const std::vector<RunReport>& reports, const std::string& path);

std::string sha256_file(const std::string& path);
// Lists every regular file under dir (sorted, relative paths) with hashes.
void write_manifest(const std::string& dir, const nlohmann::json& config);

}  // namespace cfre::bench
