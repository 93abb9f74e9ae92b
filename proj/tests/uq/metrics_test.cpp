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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "sparsification_oracle.hpp"

namespace cfre::uq {
namespace {

using testing::brute_force_curve;
using testing::brute_force_trapezoid;
using testing::hand_records;

std::vector<PredictionRecord> random_records(std::size_t n, std::mt19937_64& rng, bool with_ties) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_int_distribution<int> small(0, 3);
  std::vector<PredictionRecord> r(n);
  for (auto& rec : r) {
    rec.error = with_ties ? small(rng) : u(rng);
    rec.uncertainty = with_ties ? small(rng) : u(rng);
    rec.confidence = 0.5;
  }
  return r;
}

TEST(SparsificationTest, HandCase) {
  const std::vector<double> grid{0.0, 0.2, 0.4};
  const SparsificationCurve c = sparsification_curve(hand_records(false), RankBy::uncertainty, grid);
  ASSERT_EQ(c.remaining_error.size(), 3u);
  EXPECT_DOUBLE_EQ(c.remaining_error[0], 1.0);
  EXPECT_DOUBLE_EQ(c.remaining_error[1], 2.5 / 3.0);
  EXPECT_DOUBLE_EQ(c.remaining_error[2], 2.0 / 3.0);
  EXPECT_NEAR(c.remaining_error[1], 0.8333, 5e-5);
  EXPECT_NEAR(c.remaining_error[2], 0.6667, 5e-5);
  EXPECT_TRUE(c.normalized);
  EXPECT_FALSE(c.capped);
}

TEST(SparsificationTest, HandCaseAreas) {
  const std::vector<double> grid{0.0, 0.2, 0.4};
  const SparsificationCurve oracle = sparsification_curve(hand_records(false), RankBy::error, grid);
  const SparsificationCurve worst = sparsification_curve(hand_records(true), RankBy::uncertainty, grid);
  // Worst case removes the smallest errors first: means 3.5 and 4 of 3.
  EXPECT_DOUBLE_EQ(worst.remaining_error[1], 3.5 / 3.0);
  EXPECT_DOUBLE_EQ(worst.remaining_error[2], 4.0 / 3.0);
  EXPECT_NEAR(ause(worst, oracle), 0.2 * (1.0 / 3) / 2 + 0.2 * (1.0 / 3 + 2.0 / 3) / 2, 1e-15);
  EXPECT_EQ(ause(oracle, oracle), 0.0);
  const SparsificationCurve one = constant_baseline(grid);
  const double expect = 0.2 * (1.0 / 6) / 2 + 0.2 * (1.0 / 6 + 1.0 / 3) / 2;
  EXPECT_NEAR(aurg(oracle, one), expect, 1e-15);
  EXPECT_NEAR(aurg(worst, one), -expect, 1e-15);
  EXPECT_LT(aurg(worst, random_baseline(hand_records(true), grid, 100, 3)), 0.0);
  EXPECT_EQ(aurg(one, one), 0.0);
}

TEST(SparsificationTest, MatchingRankingEqualsOracle) {
  std::mt19937_64 rng(1);
  auto r = random_records(50, rng, false);
  for (auto& rec : r) rec.uncertainty = 2.0 * rec.error + 1.0;
  const auto model = sparsification_curve(r, RankBy::uncertainty);
  const auto oracle = sparsification_curve(r, RankBy::error);
  EXPECT_EQ(model.remaining_error, oracle.remaining_error);
}

TEST(SparsificationTest, ConstantUncertaintyKeepsTrailingRecords) {
  std::mt19937_64 rng(2);
  auto r = random_records(10, rng, false);
  for (auto& rec : r) rec.uncertainty = 1.0;
  const auto grid = default_fractions();
  const auto c = sparsification_curve(r, RankBy::uncertainty, grid);
  const double full = std::accumulate(r.begin(), r.end(), 0.0, [](double s, const auto& x) { return s + x.error; }) / 10;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t k = std::min<std::size_t>(removal_count(grid[i], 10), 9);
    double sum = 0.0;
    for (std::size_t j = k; j < 10; ++j) sum += r[j].error;
    EXPECT_NEAR(c.remaining_error[i], sum / static_cast<double>(10 - k) / full, 1e-14);
  }
}

TEST(SparsificationTest, RemovalCountIsRobustToRounding) {
  EXPECT_EQ(removal_count(0.07, 100), 7u);
  EXPECT_EQ(removal_count(0.2, 5), 1u);
  EXPECT_EQ(removal_count(0.21, 5), 2u);
  EXPECT_EQ(removal_count(0.0, 5), 0u);
}

TEST(SparsificationTest, CapsAtOneRetainedRecord) {
  const std::vector<double> grid{0.0, 0.5, 0.8};
  const auto c = sparsification_curve(hand_records(false), RankBy::uncertainty, grid);
  EXPECT_FALSE(c.capped);
  const auto capped = sparsification_curve({{1.0, 1.0, 0.0}, {2.0, 2.0, 0.0}}, RankBy::uncertainty, {0.0, 0.9});
  EXPECT_TRUE(capped.capped);
  EXPECT_DOUBLE_EQ(capped.remaining_error[1], 1.0 / 1.5);
}

TEST(SparsificationTest, AllZeroErrorsSkipNormalization) {
  const auto c = sparsification_curve({{0.0, 1.0, 0.0}, {0.0, 2.0, 0.0}}, RankBy::uncertainty, {0.0, 0.5});
  EXPECT_FALSE(c.normalized);
  EXPECT_EQ(c.remaining_error, (std::vector<double>{0.0, 0.0}));
}

TEST(SparsificationTest, RejectsBadInput) {
  EXPECT_THROW(sparsification_curve({}, RankBy::error), InvalidArgument);
  EXPECT_THROW(sparsification_curve({{-1.0, 0.0, 0.0}}, RankBy::error), InvalidArgument);
  EXPECT_THROW(sparsification_curve({{1.0, NAN, 0.0}}, RankBy::error), InvalidArgument);
  EXPECT_THROW(sparsification_curve({{1.0, 1.0, 1.5}}, RankBy::error), InvalidArgument);
  EXPECT_THROW(sparsification_curve({{1.0, 1.0, 0.0}}, RankBy::error, {0.0, 1.0}), InvalidArgument);
  EXPECT_THROW(sparsification_curve({{1.0, 1.0, 0.0}}, RankBy::error, {0.5, 0.2}), InvalidArgument);
  const auto a = constant_baseline({0.0, 0.5});
  const auto b = constant_baseline({0.0, 0.4});
  EXPECT_THROW(ause(a, b), InvalidArgument);
  EXPECT_THROW(aurg(a, b), InvalidArgument);
}

// Exhaustive check: every ordering of uncertainties for N <= 7 and random
// sets (with and without ties) for every N <= 12, on the dense default grid.
TEST(SparsificationTest, MatchesBruteForceExactly) {
  const auto grid = default_fractions();
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      auto r = random_records(n, rng, trial % 2 == 0);
      for (bool by_error : {false, true}) {
        const auto c = sparsification_curve(r, by_error ? RankBy::error : RankBy::uncertainty, grid);
        ASSERT_EQ(c.remaining_error, brute_force_curve(r, by_error, grid)) << "n=" << n << " trial=" << trial;
      }
    }
  }
  for (std::size_t n = 1; n <= 7; ++n) {
    auto r = random_records(n, rng, false);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const auto oracle = sparsification_curve(r, RankBy::error, grid);
    do {
      for (std::size_t i = 0; i < n; ++i) r[i].uncertainty = perm[i];
      const auto c = sparsification_curve(r, RankBy::uncertainty, grid);
      const auto bf = brute_force_curve(r, false, grid);
      ASSERT_EQ(c.remaining_error, bf);
      EXPECT_EQ(ause(c, oracle), brute_force_trapezoid(grid, bf, brute_force_curve(r, true, grid)));
      EXPECT_EQ(aurg(c, constant_baseline(grid)),
                brute_force_trapezoid(grid, std::vector<double>(grid.size(), 1.0), bf));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(SparsificationTest, OracleDominates) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = random_records(1 + trial % 40, rng, trial % 3 == 0);
    const auto model = sparsification_curve(r, RankBy::uncertainty);
    const auto oracle = sparsification_curve(r, RankBy::error);
    for (std::size_t i = 0; i < model.fractions.size(); ++i) {
      EXPECT_LE(oracle.remaining_error[i], model.remaining_error[i] + 1e-12);
    }
    EXPECT_GE(ause(model, oracle), -1e-12);
  }
}

TEST(SparsificationTest, PermutationInvariantForDistinctValues) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = random_records(30, rng, false);
    const UqReport a = evaluate(r, default_fractions(), 10, 7);
    std::shuffle(r.begin(), r.end(), rng);
    const UqReport b = evaluate(r, default_fractions(), 10, 7);
    EXPECT_NEAR(a.ause, b.ause, 1e-12);
    EXPECT_NEAR(a.pcc, b.pcc, 1e-12);
    for (std::size_t i = 0; i < a.model.fractions.size(); ++i) {
      EXPECT_NEAR(a.model.remaining_error[i], b.model.remaining_error[i], 1e-12);
    }
  }
}

TEST(SparsificationTest, ScaleInvariantBitForBit) {
  std::mt19937_64 rng(6);
  auto r = random_records(60, rng, true);
  const UqReport a = evaluate(r);
  for (auto& rec : r) rec.uncertainty *= 3.7;
  const UqReport b = evaluate(r);
  EXPECT_EQ(a.model.remaining_error, b.model.remaining_error);
  EXPECT_EQ(a.ause, b.ause);
  EXPECT_EQ(a.aurg, b.aurg);
}

TEST(RandomBaselineTest, NearOneAndSeeded) {
  std::mt19937_64 rng(7);
  const auto r = random_records(400, rng, false);
  const auto a = random_baseline(r, default_fractions(), 100, 9);
  const auto b = random_baseline(r, default_fractions(), 100, 9);
  EXPECT_EQ(a.remaining_error, b.remaining_error);
  EXPECT_EQ(a.remaining_error[0], 1.0);
  for (std::size_t i = 0; i < 90; ++i) EXPECT_NEAR(a.remaining_error[i], 1.0, 0.05);
  EXPECT_NEAR(aurg(a, a), 0.0, 0.0);
  EXPECT_THROW(random_baseline(r, default_fractions(), 0, 1), InvalidArgument);
}

TEST(PccTest, Values) {
  const std::vector<double> e{1.0, 2.0, 3.0, 4.5};
  EXPECT_NEAR(pcc(e, e), 1.0, 1e-15);
  std::vector<double> neg;
  for (double v : e) neg.push_back(10.0 - v);
  EXPECT_NEAR(pcc(e, neg), -1.0, 1e-15);
  // n*Sxy - Sx*Sy over the root of the variance products: 15 / sqrt(228).
  EXPECT_NEAR(pcc({1, 2, 3}, {2, 4, 7}), 15.0 / std::sqrt(228.0), 1e-15);
  EXPECT_NEAR(pcc({1, 2, 3}, {2, 4, 7}), 0.99340, 5e-6);
}

TEST(PccTest, Errors) {
  EXPECT_THROW(pcc({1.0}, {1.0}), InvalidArgument);
  EXPECT_THROW(pcc({1.0, 1.0}, {1.0, 2.0}), UndefinedCorrelation);
  EXPECT_THROW(pcc({1.0, 2.0}, {3.0, 3.0}), UndefinedCorrelation);
  EXPECT_THROW(pcc({1.0, 2.0}, {3.0}), InvalidArgument);
}

TEST(CsvTest, RoundTripAndHeaderCheck) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "cfre_records_test.csv").string();
  std::mt19937_64 rng(8);
  auto r = random_records(20, rng, false);
  write_records_csv(r, path);
  const auto back = read_records_csv(path);
  ASSERT_EQ(back.size(), r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(back[i].error, r[i].error);
    EXPECT_EQ(back[i].uncertainty, r[i].uncertainty);
  }
  {
    std::ofstream bad(path);
    bad << "err,unc\n1,2\n";
  }
  EXPECT_THROW(read_records_csv(path), InvalidArgument);
  {
    std::ofstream bad(path);
    bad << "error,uncertainty,confidence\n1,2\n";
  }
  EXPECT_THROW(read_records_csv(path), InvalidArgument);
  std::filesystem::remove(path);

  const auto curve_path = (dir / "cfre_curve_test.csv").string();
  write_curve_csv(constant_baseline({0.0, 0.5}), curve_path);
  std::ifstream in(curve_path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "fraction,remaining_error");
  std::filesystem::remove(curve_path);
}

TEST(MetricsJsonTest, Keys) {
  const UqReport rep = evaluate(hand_records(false), {0.0, 0.2, 0.4}, 10, 1);
  const auto j = metrics_json(rep);
  for (const char* k : {"ause", "aurg", "pcc", "normalized", "capped"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["ause"].get<double>(), 0.0);
}

}  // namespace
}  // namespace cfre::uq
