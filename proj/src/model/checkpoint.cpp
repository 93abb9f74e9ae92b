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

#include "cfre/model/checkpoint.hpp"

#include <fstream>

#include "cfre/errors.hpp"

namespace cfre::model {

namespace {

nlohmann::json flat_weights(const std::vector<ad::Var>& params) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ad::Var& p : params) arr.push_back(p.value().to_vector());
  return arr;
}

std::vector<ad::Array> read_weights(const nlohmann::json& arr, const std::vector<std::size_t>& widths,
                                    const char* which) {
  if (!arr.is_array() || arr.size() != 2 * (widths.size() - 1)) {
    throw InvalidArgument(std::string("checkpoint: wrong number of ") + which + " weight arrays");
  }
  std::vector<ad::Array> out;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const ad::Shape ws{widths[l], widths[l + 1]}, bs{1, widths[l + 1]};
    auto w = arr[2 * l].get<std::vector<double>>();
    auto b = arr[2 * l + 1].get<std::vector<double>>();
    if (w.size() != ws[0] * ws[1] || b.size() != bs[1]) {
      throw InvalidArgument(std::string("checkpoint: ") + which + " layer " + std::to_string(l) + " has wrong size");
    }
    out.emplace_back(ws, std::move(w));
    out.emplace_back(bs, std::move(b));
  }
  return out;
}

}  // namespace

nlohmann::json checkpoint_to_json(const TrainedCfre& m) {
  nlohmann::json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["data_dim"] = m.regression.D();
  j["K"] = m.regression.K();
  j["input_dim"] = m.regression.input_dim();
  j["widths"] = {{"regression", m.regression.widths()}, {"flow", m.flow.widths()}};
  j["base_kind"] = to_string(m.base);
  j["sigma_min"] = m.flow_cfg.sigma_min;
  j["trace_mode"] = flow::to_string(m.flow_cfg.trace_mode);
  j["hutchinson_probes"] = m.flow_cfg.hutchinson_probes;
  j["probe_law"] = flow::to_string(m.flow_cfg.probe_law);
  j["flow_active"] = m.flow_active;
  j["trainer"] = to_string(m.trainer);
  j["weights"] = {{"regression", flat_weights(m.regression.parameters())},
                  {"flow", flat_weights(m.flow.parameters())}};
  return j;
}

TrainedCfre checkpoint_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw InvalidArgument("checkpoint: unsupported format_version " + std::to_string(version));
    }
    const auto D = j.at("data_dim").get<std::size_t>();
    const auto K = j.at("K").get<std::size_t>();
    const auto reg_widths = j.at("widths").at("regression").get<std::vector<std::size_t>>();
    const auto flow_widths_ = j.at("widths").at("flow").get<std::vector<std::size_t>>();
    if (reg_widths.size() < 2 || flow_widths_.size() < 2) throw InvalidArgument("checkpoint: bad widths");
    TrainedCfre m;
    m.regression = RegressionModel(reg_widths, K, D, read_weights(j.at("weights").at("regression"), reg_widths,
                                                                  "regression"));
    m.flow = flow::VectorFieldNet(flow_widths_, read_weights(j.at("weights").at("flow"), flow_widths_, "flow"));
    if (m.flow.dim() != D) throw InvalidArgument("checkpoint: flow dimension differs from data_dim");
    m.base = parse_base_kind(j.at("base_kind").get<std::string>());
    m.flow_cfg.sigma_min = j.at("sigma_min").get<double>();
    m.flow_cfg.trace_mode = flow::parse_trace_mode(j.value("trace_mode", std::string("exact")));
    m.flow_cfg.hutchinson_probes = j.value("hutchinson_probes", 1);
    m.flow_cfg.probe_law = flow::parse_probe_law(j.value("probe_law", std::string("rademacher")));
    m.flow_cfg.validate();
    m.flow_active = j.at("flow_active").get<bool>();
    m.trainer = parse_trainer(j.value("trainer", std::string("cfre")));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("checkpoint: malformed JSON (") + e.what() + ")");
  }
}

void save_checkpoint(const TrainedCfre& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << checkpoint_to_json(model).dump(1) << '\n';
}

TrainedCfre load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("checkpoint '" + path + "': " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace cfre::model
