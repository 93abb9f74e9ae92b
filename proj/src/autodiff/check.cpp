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

#include "cfre/autodiff/check.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "cfre/autodiff/grad.hpp"
#include "cfre/errors.hpp"

namespace cfre::ad {

std::string GradientReport::to_json_line() const {
  nlohmann::json j;
  j["shape"] = analytic.shape();
  j["analytic"] = std::vector<double>(analytic.data().begin(), analytic.data().end());
  j["numeric"] = std::vector<double>(numeric.data().begin(), numeric.data().end());
  j["max_rel_error"] = max_rel_error;
  return j.dump();
}

double max_relative_error(const Array& analytic, const Array& numeric) {
  if (analytic.shape() != numeric.shape()) throw InvalidArgument("max_relative_error: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    const double denom = std::max({std::abs(a), std::abs(n), 1e-8});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

Array numeric_gradient(const ScalarFn& f, const Array& point, double h) {
  if (!(h > 0.0)) throw InvalidArgument("numeric_gradient: step h must be positive");
  NoGradGuard no_grad;
  std::vector<double> g(point.size());
  std::vector<double> x = point.to_vector();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(constant(Array(point.shape(), x))).item();
    x[i] = orig - h;
    const double fm = f(constant(Array(point.shape(), x))).item();
    x[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericInstability("numeric_gradient: non-finite function value at coordinate " + std::to_string(i));
    }
    g[i] = (fp - fm) / (2.0 * h);
  }
  return Array(point.shape(), std::move(g));
}

GradientReport check_gradient(const ScalarFn& f, const Array& point, double h) {
  if (!(h > 0.0)) throw InvalidArgument("check_gradient: step h must be positive");
  GradientReport report;
  {
    GradModeGuard on(true);
    Var x = parameter(point);
    Var y = f(x);
    if (!y.value().all_finite()) throw NumericInstability("check_gradient: non-finite function value");
    report.analytic = grad(y, {x})[0].value();
  }
  report.numeric = numeric_gradient(f, point, h);
  if (!report.analytic.all_finite()) throw NumericInstability("check_gradient: non-finite analytic gradient");
  report.max_rel_error = max_relative_error(report.analytic, report.numeric);
  return report;
}

}  // namespace cfre::ad
