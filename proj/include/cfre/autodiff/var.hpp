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
#include <memory>
#include <span>
#include <vector>

#include "cfre/autodiff/array.hpp"

namespace cfre::ad {

class Var;

namespace detail {

// Fills grads[i] with the contribution to input i wherever want[i] is set.
// Must build its result from Var operations so that the backward pass is
// itself differentiable.
using BackwardFn = std::function<void(const Var& grad_out, const Var& out, std::span<const Var> inputs,
                                      std::span<const char> want, std::span<Var> grads)>;

struct Node {
  Array value;
  bool requires_grad = false;
  std::vector<Var> inputs;
  BackwardFn backward;

  ~Node();
};

}  // namespace detail

// Handle to a node of the computation graph. Cheap to copy; the node's value
// never changes after construction.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  bool defined() const noexcept { return node_ != nullptr; }
  const Array& value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  std::size_t size() const { return node_->value.size(); }
  double item() const { return node_->value.item(); }
  bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
  bool is_leaf() const noexcept { return node_ && !node_->backward; }

  const detail::Node* id() const noexcept { return node_.get(); }
  const std::shared_ptr<detail::Node>& node() const noexcept { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

// Graph leaf that never receives gradients.
Var constant(Array value);
Var constant(double value);
// Graph leaf that gradients flow into.
Var parameter(Array value);

// Recording is per thread. With recording off, every op returns a constant.
bool grad_enabled() noexcept;

class GradModeGuard {
 public:
  explicit GradModeGuard(bool enabled);
  ~GradModeGuard();
  GradModeGuard(const GradModeGuard&) = delete;
  GradModeGuard& operator=(const GradModeGuard&) = delete;

 private:
  bool previous_;
};

class NoGradGuard : public GradModeGuard {
 public:
  NoGradGuard() : GradModeGuard(false) {}
};

namespace detail {
// Builds an op result. Inputs are recorded only when recording is on and at
// least one input requires a gradient.
Var make_result(Array value, std::vector<Var> inputs, BackwardFn backward);
}  // namespace detail

}  // namespace cfre::ad
