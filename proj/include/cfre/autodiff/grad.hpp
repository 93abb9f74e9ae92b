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

#include <span>
#include <vector>

#include "cfre/autodiff/var.hpp"

namespace cfre::ad {

struct Gradients {
  // One entry per requested node, shaped like that node.
  std::vector<Var> values;
  // True where the node is not reachable from the output; its value is zeros.
  std::vector<bool> unreachable;

  const Var& operator[](std::size_t i) const { return values[i]; }
  bool any_unreachable() const;
};

// Reverse-mode derivative of a scalar `output` with respect to each node in
// `wrt`. With create_graph the returned nodes are themselves differentiable,
// which is how second derivatives and Jacobian-trace terms are trained.
// Throws InvalidArgument if output is not a scalar.
Gradients grad(const Var& output, std::span<const Var> wrt, bool create_graph = false);
Gradients grad(const Var& output, std::initializer_list<Var> wrt, bool create_graph = false);

}  // namespace cfre::ad
