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

#include "cfre/autodiff/var.hpp"

namespace cfre::ad {

namespace {
thread_local bool g_grad_enabled = true;
}

namespace detail {

// Long chains (an unrolled ODE) would otherwise recurse once per node.
Node::~Node() {
  std::vector<std::shared_ptr<Node>> pending;
  auto release = [&pending](std::vector<Var>& inputs) {
    std::vector<std::shared_ptr<Node>> owned;
    owned.reserve(inputs.size());
    for (auto& in : inputs) owned.push_back(in.node());
    inputs.clear();
    for (auto& n : owned) {
      if (n && n.use_count() == 1) pending.push_back(std::move(n));
    }
  };
  backward = nullptr;
  release(inputs);
  while (!pending.empty()) {
    std::shared_ptr<Node> n = std::move(pending.back());
    pending.pop_back();
    n->backward = nullptr;
    release(n->inputs);
  }
}

Var make_result(Array value, std::vector<Var> inputs, BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  bool any = false;
  if (g_grad_enabled) {
    for (const auto& in : inputs) any = any || in.requires_grad();
  }
  if (any) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

}  // namespace detail

Var constant(Array value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var constant(double value) { return constant(Array::scalar(value)); }

Var parameter(Array value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

bool grad_enabled() noexcept { return g_grad_enabled; }

GradModeGuard::GradModeGuard(bool enabled) : previous_(g_grad_enabled) { g_grad_enabled = enabled; }

GradModeGuard::~GradModeGuard() { g_grad_enabled = previous_; }

}  // namespace cfre::ad
