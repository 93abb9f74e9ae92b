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
#include <random>
#include <string>

#include "cfre/rng.hpp"

namespace cfre::flow {

using Rng = cfre::Rng;

enum class TraceMode { exact, hutchinson };
enum class ProbeLaw { gaussian, rademacher };

std::string to_string(TraceMode mode);
std::string to_string(ProbeLaw law);
TraceMode parse_trace_mode(const std::string& s);
ProbeLaw parse_probe_law(const std::string& s);

struct FlowConfig {
  // Width of the target distribution at the end of the OT path.
  double sigma_min = 0.01;
  TraceMode trace_mode = TraceMode::exact;
  int hutchinson_probes = 1;
  ProbeLaw probe_law = ProbeLaw::rademacher;

  void validate() const;
  bool operator==(const FlowConfig&) const = default;
};

// Fixed-step classical RK4 over t in [0, 1].
struct OdeConfig {
  int steps = 64;

  void validate() const;
  bool operator==(const OdeConfig&) const = default;
  double step_size() const { return 1.0 / steps; }
};

}  // namespace cfre::flow
