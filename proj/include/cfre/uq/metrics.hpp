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

#include <nlohmann/json.hpp>

#include "cfre/errors.hpp"

namespace cfre::uq {

struct PredictionRecord {
  double error = 0.0;        // >= 0, e.g. Euclidean joint error
  double uncertainty = 0.0;  // >= 0
  double confidence = 0.0;   // in [0, 1]
};

// Throws InvalidArgument naming the first offending record.
void validate_records(const std::vector<PredictionRecord>& records);

// Pearson correlation needs variance in both series.
class UndefinedCorrelation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class RankBy { uncertainty, error };

struct SparsificationCurve {
  std::vector<double> fractions;
  std::vector<double> remaining_error;
  // False when every error is zero: values are then raw (all-zero) means.
  bool normalized = true;
  // True when some fraction would have removed every record; that point
  // keeps exactly one record instead.
  bool capped = false;
};

// 0, 0.01, ..., 0.99.
std::vector<double> default_fractions();

// At fraction phi remove the ceil(phi * N) records with the largest `by`
// value (equal values: earlier records go first) and report the mean error
// of the rest divided by the full-set mean. by = error gives the oracle.
SparsificationCurve sparsification_curve(const std::vector<PredictionRecord>& records, RankBy by,
                                         const std::vector<double>& fractions = default_fractions());

// Records removed at fraction phi out of n (before capping).
std::size_t removal_count(double phi, std::size_t n);

// Mean curve over `rounds` uniformly random removal orders drawn from `seed`.
SparsificationCurve random_baseline(const std::vector<PredictionRecord>& records,
                                    const std::vector<double>& fractions = default_fractions(), int rounds = 100,
                                    std::uint64_t seed = 0);

// The expectation of the random baseline: 1 at every fraction.
SparsificationCurve constant_baseline(const std::vector<double>& fractions);

// Trapezoidal area of (a - b) over the shared grid.
double area_between(const SparsificationCurve& a, const SparsificationCurve& b);

double ause(const SparsificationCurve& model, const SparsificationCurve& oracle);
double aurg(const SparsificationCurve& model, const SparsificationCurve& random_baseline);

double pcc(const std::vector<double>& errors, const std::vector<double>& uncertainties);

struct UqReport {
  SparsificationCurve model;
  SparsificationCurve oracle;
  SparsificationCurve random;
  double ause = 0.0;
  double aurg = 0.0;
  double pcc = 0.0;
};

UqReport evaluate(const std::vector<PredictionRecord>& records,
                  const std::vector<double>& fractions = default_fractions(), int random_rounds = 100,
                  std::uint64_t seed = 0);

// {ause, aurg, pcc, normalized, capped}
nlohmann::json metrics_json(const UqReport& report);

// CSV `error,uncertainty,confidence` with that header.
std::vector<PredictionRecord> read_records_csv(const std::string& path);
void write_records_csv(const std::vector<PredictionRecord>& records, const std::string& path);
// CSV `fraction,remaining_error`.
void write_curve_csv(const SparsificationCurve& curve, const std::string& path);

}  // namespace cfre::uq
