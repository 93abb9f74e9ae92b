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

#include <ostream>
#include <string>
#include <vector>

namespace cfre::bench {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fast invariant suite (gradients, norm inequalities, RK4 accuracy and
// order, Hutchinson mean, identity-flow density, loss hand values,
// sparsification against brute force, c = 0 degeneration). Prints one line
// per check to `out`.
std::vector<SelftestCheck> run_selftest(std::ostream& out);

}  // namespace cfre::bench
