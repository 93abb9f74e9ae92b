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

#include <functional>
#include <string>

#include "cfre/autodiff/var.hpp"

namespace cfre::ad {

struct GradientReport {
  Array analytic;
  Array numeric;
  double max_rel_error = 0.0;

  // Single-line JSON object, as printed by the test harness.
  std::string to_json_line() const;
};

using ScalarFn = std::function<Var(const Var&)>;

// Compares reverse-mode gradients of f at `point` with central differences
// of step h. Relative error per entry uses max(|analytic|, |numeric|, 1e-8)
// as denominator. Throws InvalidArgument for h <= 0 and NumericInstability
// if f or either gradient is non-finite.
GradientReport check_gradient(const ScalarFn& f, const Array& point, double h = 1e-5);

// Central-difference gradient alone; f is evaluated with recording off.
Array numeric_gradient(const ScalarFn& f, const Array& point, double h = 1e-5);

double max_relative_error(const Array& analytic, const Array& numeric);

}  // namespace cfre::ad
