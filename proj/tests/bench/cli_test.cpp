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

// Drives the cfre-bench executable end to end.
#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cfre/model/checkpoint.hpp"
#include "cfre/model/regression.hpp"

namespace fs = std::filesystem;
using namespace cfre;

namespace {

const fs::path kTmp = fs::temp_directory_path() / "cfre_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(CFRE_BENCH_EXE) + " " + args + " > " + (kTmp / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { fs::create_directories(kTmp); }
};

}  // namespace

TEST_F(Cli, SelftestPasses) { EXPECT_EQ(run("selftest"), 0); }

TEST_F(Cli, HelpAndParseErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("train --no-such-flag"), 1);
  EXPECT_EQ(run("eval"), 1);  // --checkpoint is required
  EXPECT_EQ(run("sparsify --input /nonexistent.csv"), 1);
}

TEST_F(Cli, SparsifyHandCase) {
  const fs::path csv = kTmp / "hand.csv";
  std::ofstream(csv) << "error,uncertainty,confidence\n5,5,0.5\n4,4,0.5\n3,3,0.5\n2,2,0.5\n1,1,0.5\n";
  ASSERT_EQ(run("sparsify --input " + csv.string() + " --out " + (kTmp / "sp").string()), 0);
  const auto curve = read_csv(kTmp / "sp" / "sparsification_model.csv");
  std::map<int, double> at;
  for (const auto& r : curve) at[static_cast<int>(std::lround(r[0] * 100))] = r[1];
  EXPECT_NEAR(at[0], 1.0, 1e-15);
  EXPECT_NEAR(at[20], 2.5 / 3, 1e-15);
  EXPECT_NEAR(at[40], 2.0 / 3, 1e-15);
  std::ifstream m(kTmp / "sp" / "metrics.json");
  const nlohmann::json j = nlohmann::json::parse(m);
  for (const char* k : {"ause", "aurg", "pcc"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST_F(Cli, TrainSmokeConfigThenCompare) {
  const fs::path out = kTmp / "smoke";
  fs::remove_all(out);
  ASSERT_EQ(run(std::string("train --config ") + CFRE_CONFIG_DIR + "/smoke.json --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  const fs::path ckpt = out / "cfre_c0.1" / "seed_0" / "checkpoint.json";
  ASSERT_TRUE(fs::exists(ckpt));
  EXPECT_EQ(run(std::string("eval --config ") + CFRE_CONFIG_DIR + "/smoke.json --checkpoint " + ckpt.string()), 0);
  EXPECT_EQ(run("compare " + (out / "cfre_c0.1").string() + " --out " + (kTmp / "cmp.csv").string()), 0);
  EXPECT_TRUE(fs::exists(kTmp / "cmp.csv"));
}

TEST_F(Cli, DensityGridIdentityFlow) {
  std::mt19937_64 rng(5);
  model::TrainedCfre m;
  m.regression = model::RegressionModel(3, 1, 2, {8}, rng);
  std::vector<ad::Array> zeros;
  const flow::VectorFieldNet shape_source(model::flow_widths(2, {8}), rng);
  for (const auto& p : shape_source.parameters()) {
    zeros.push_back(ad::Array::zeros(p.shape()));
  }
  m.flow = flow::VectorFieldNet(model::flow_widths(2, {8}), zeros);
  m.flow_active = true;
  const fs::path ckpt = kTmp / "identity.json", grid = kTmp / "grid.csv";
  model::save_checkpoint(m, ckpt.string());
  ASSERT_EQ(run("density-grid --checkpoint " + ckpt.string() + " --grid-range -2 2 --grid-steps 21 --samples 50 --out " +
                grid.string()),
            0);
  const model::PredictResult p = model::predict(m.regression, ad::Array::zeros({1, 3}));
  const double mx = p.mu.at(0, 0), my = p.mu.at(0, 1), sx = p.sigma.at(0, 0), sy = p.sigma.at(0, 1);
  const auto rows = read_csv(grid);
  ASSERT_EQ(rows.size(), 21u * 21u);
  for (const auto& r : rows) {
    const double u = (r[0] - mx) / sx, v = (r[1] - my) / sy;
    EXPECT_NEAR(r[2], -0.5 * (u * u + v * v) - std::log(2 * std::numbers::pi * sx * sy), 1e-12);
  }
  EXPECT_EQ(read_csv(kTmp / "grid_samples.csv").size(), 50u);
}
