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

#include <string>

#include <nlohmann/json.hpp>

#include "cfre/model/train.hpp"

namespace cfre::model {

inline constexpr int kCheckpointFormatVersion = 1;

// Versioned JSON: header {format_version, data_dim, K, widths, base_kind,
// sigma_min, ...} then flat weight arrays in declaration order (W0, b0, W1,
// b1, ...) for the regression net and the flow. Training history is not
// stored; it lives in the history CSV.
nlohmann::json checkpoint_to_json(const TrainedCfre& model);
TrainedCfre checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const TrainedCfre& model, const std::string& path);
TrainedCfre load_checkpoint(const std::string& path);

}  // namespace cfre::model
