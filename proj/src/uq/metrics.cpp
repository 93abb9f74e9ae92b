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

#include "cfre/uq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace cfre::uq {

namespace {

void check_fractions(const std::vector<double>& fractions) {
  if (fractions.empty()) throw InvalidArgument("sparsification: empty fraction grid");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double f = fractions[i];
    if (!(f >= 0.0 && f < 1.0)) throw InvalidArgument("sparsification: fraction " + std::to_string(f) + " outside [0, 1)");
    if (i > 0 && !(f > fractions[i - 1])) throw InvalidArgument("sparsification: fractions must be ascending");
  }
}

// Curve for a fixed removal order (order[0] is removed first). Means are
// accumulated over the retained records in input order.
SparsificationCurve curve_for_order(const std::vector<PredictionRecord>& records, const std::vector<std::size_t>& order,
                                    const std::vector<double>& fractions) {
  const std::size_t n = records.size();
  double full = 0.0;
  for (const auto& r : records) full += r.error;
  full /= static_cast<double>(n);

  SparsificationCurve c;
  c.fractions = fractions;
  c.normalized = full > 0.0;
  std::vector<char> removed(n, 0);
  std::size_t done = 0;
  for (double phi : fractions) {
    std::size_t k = removal_count(phi, n);
    if (k >= n) {
      k = n - 1;
      c.capped = true;
    }
    for (; done < k; ++done) removed[order[done]] = 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!removed[i]) sum += records[i].error;
    }
    const double mean = sum / static_cast<double>(n - k);
    c.remaining_error.push_back(c.normalized ? mean / full : mean);
  }
  return c;
}

void check_grids(const SparsificationCurve& a, const SparsificationCurve& b) {
  if (a.fractions != b.fractions || a.remaining_error.size() != a.fractions.size() ||
      b.remaining_error.size() != b.fractions.size()) {
    throw InvalidArgument("sparsification curves are on different fraction grids");
  }
}

}  // namespace

void validate_records(const std::vector<PredictionRecord>& records) {
  if (records.empty()) throw InvalidArgument("no prediction records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!std::isfinite(r.error) || r.error < 0.0 || !std::isfinite(r.uncertainty) || r.uncertainty < 0.0) {
      throw InvalidArgument("record " + std::to_string(i) + ": error and uncertainty must be finite and >= 0");
    }
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw InvalidArgument("record " + std::to_string(i) + ": confidence outside [0, 1]");
    }
  }
}

std::vector<double> default_fractions() {
  std::vector<double> f(100);
  for (int i = 0; i < 100; ++i) f[static_cast<std::size_t>(i)] = i / 100.0;
  return f;
}

std::size_t removal_count(double phi, std::size_t n) {
  // The guard keeps products like 0.07 * 100 = 7.000000000000001 at 7.
  return static_cast<std::size_t>(std::ceil(phi * static_cast<double>(n) - 1e-9));
}

SparsificationCurve sparsification_curve(const std::vector<PredictionRecord>& records, RankBy by,
                                         const std::vector<double>& fractions) {
  validate_records(records);
  check_fractions(fractions);
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  const auto key = [&](std::size_t i) { return by == RankBy::error ? records[i].error : records[i].uncertainty; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  return curve_for_order(records, order, fractions);
}

SparsificationCurve random_baseline(const std::vector<PredictionRecord>& records, const std::vector<double>& fractions,
                                    int rounds, std::uint64_t seed) {
  validate_records(records);
  check_fractions(fractions);
  if (rounds < 1) throw InvalidArgument("random baseline: rounds must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(records.size());
  SparsificationCurve mean;
  for (int r = 0; r < rounds; ++r) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    SparsificationCurve c = curve_for_order(records, order, fractions);
    if (r == 0) {
      mean = std::move(c);
      continue;
    }
    for (std::size_t i = 0; i < fractions.size(); ++i) mean.remaining_error[i] += c.remaining_error[i];
  }
  for (double& v : mean.remaining_error) v /= rounds;
  return mean;
}

SparsificationCurve constant_baseline(const std::vector<double>& fractions) {
  check_fractions(fractions);
  SparsificationCurve c;
  c.fractions = fractions;
  c.remaining_error.assign(fractions.size(), 1.0);
  return c;
}

double area_between(const SparsificationCurve& a, const SparsificationCurve& b) {
  check_grids(a, b);
  double area = 0.0;
  for (std::size_t i = 1; i < a.fractions.size(); ++i) {
    const double d0 = a.remaining_error[i - 1] - b.remaining_error[i - 1];
    const double d1 = a.remaining_error[i] - b.remaining_error[i];
    area += 0.5 * (d0 + d1) * (a.fractions[i] - a.fractions[i - 1]);
  }
  return area;
}

double ause(const SparsificationCurve& model, const SparsificationCurve& oracle) { return area_between(model, oracle); }

double aurg(const SparsificationCurve& model, const SparsificationCurve& random_baseline) {
  return area_between(random_baseline, model);
}

double pcc(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("pcc: series lengths differ");
  if (x.size() < 2) throw InvalidArgument("pcc: need at least two records");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pcc: zero variance, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

UqReport evaluate(const std::vector<PredictionRecord>& records, const std::vector<double>& fractions,
                  int random_rounds, std::uint64_t seed) {
  UqReport r;
  r.model = sparsification_curve(records, RankBy::uncertainty, fractions);
  r.oracle = sparsification_curve(records, RankBy::error, fractions);
  r.random = random_baseline(records, fractions, random_rounds, seed);
  r.ause = ause(r.model, r.oracle);
  r.aurg = aurg(r.model, r.random);
  std::vector<double> e, u;
  for (const auto& rec : records) {
    e.push_back(rec.error);
    u.push_back(rec.uncertainty);
  }
  r.pcc = pcc(e, u);
  return r;
}

nlohmann::json metrics_json(const UqReport& report) {
  return {{"ause", report.ause},
          {"aurg", report.aurg},
          {"pcc", report.pcc},
          {"normalized", report.model.normalized},
          {"capped", report.model.capped}};
}

std::vector<PredictionRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open records CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "error,uncertainty,confidence") {
    throw InvalidArgument(path + ": expected header 'error,uncertainty,confidence', got '" + line + "'");
  }
  std::vector<PredictionRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    PredictionRecord r;
    char c1 = 0, c2 = 0;
    if (!(ss >> r.error >> c1 >> r.uncertainty >> c2 >> r.confidence) || c1 != ',' || c2 != ',' ||
        !(ss >> std::ws).eof()) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
    }
    out.push_back(r);
  }
  validate_records(out);
  return out;
}

void write_records_csv(const std::vector<PredictionRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << "error,uncertainty,confidence\n" << std::setprecision(17);
  for (const auto& r : records) out << r.error << ',' << r.uncertainty << ',' << r.confidence << '\n';
}

void write_curve_csv(const SparsificationCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << "fraction,remaining_error\n" << std::setprecision(17);
  for (std::size_t i = 0; i < curve.fractions.size(); ++i) {
    out << curve.fractions[i] << ',' << curve.remaining_error[i] << '\n';
  }
}

}  // namespace cfre::uq
