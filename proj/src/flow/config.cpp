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

#include "cfre/flow/config.hpp"

#include "cfre/errors.hpp"

namespace cfre::flow {

std::string to_string(TraceMode mode) { return mode == TraceMode::exact ? "exact" : "hutchinson"; }

std::string to_string(ProbeLaw law) { return law == ProbeLaw::gaussian ? "gaussian" : "rademacher"; }

TraceMode parse_trace_mode(const std::string& s) {
  if (s == "exact") return TraceMode::exact;
  if (s == "hutchinson") return TraceMode::hutchinson;
  throw InvalidArgument("unknown trace mode '" + s + "'");
}

ProbeLaw parse_probe_law(const std::string& s) {
  if (s == "gaussian") return ProbeLaw::gaussian;
  if (s == "rademacher") return ProbeLaw::rademacher;
  throw InvalidArgument("unknown probe law '" + s + "'");
}

void FlowConfig::validate() const {
  if (!(sigma_min >= 0.0 && sigma_min < 1.0)) throw InvalidArgument("sigma_min must lie in [0, 1)");
  if (hutchinson_probes < 1) throw InvalidArgument("hutchinson_probes must be >= 1");
}

void OdeConfig::validate() const {
  if (steps < 1) throw InvalidArgument("ODE steps must be >= 1");
}

}  // namespace cfre::flow
