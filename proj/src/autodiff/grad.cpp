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

#include "cfre/autodiff/grad.hpp"

#include <unordered_map>
#include <unordered_set>

#include "cfre/autodiff/ops.hpp"
#include "cfre/errors.hpp"

namespace cfre::ad {

bool Gradients::any_unreachable() const {
  for (bool u : unreachable) {
    if (u) return true;
  }
  return false;
}

Gradients grad(const Var& output, std::initializer_list<Var> wrt, bool create_graph) {
  return grad(output, std::span<const Var>(wrt.begin(), wrt.size()), create_graph);
}

Gradients grad(const Var& output, std::span<const Var> wrt, bool create_graph) {
  if (!output.defined()) throw InvalidArgument("grad: undefined output");
  if (output.size() != 1) {
    throw InvalidArgument("grad: output must be scalar, got shape " + shape_string(output.shape()));
  }

  std::unordered_set<const detail::Node*> targets;
  for (const auto& w : wrt) {
    if (w.defined()) targets.insert(w.id());
  }

  // Post-order over nodes that carry gradients: inputs precede consumers.
  std::vector<const Var*> order;
  std::unordered_map<const detail::Node*, std::size_t> index;
  if (output.requires_grad()) {
    struct Frame {
      const Var* var;
      std::size_t next;
    };
    std::vector<Frame> stack{{&output, 0}};
    std::unordered_set<const detail::Node*> seen{output.id()};
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& inputs = f.var->node()->inputs;
      if (f.next < inputs.size()) {
        const Var& in = inputs[f.next++];
        if (in.requires_grad() && seen.insert(in.id()).second) stack.push_back({&in, 0});
      } else {
        index[f.var->id()] = order.size();
        order.push_back(f.var);
        stack.pop_back();
      }
    }
  }

  // A node is worth visiting only if some requested node lies below it.
  std::vector<char> reaches(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Var& v = *order[i];
    bool r = targets.count(v.id()) > 0;
    for (const auto& in : v.node()->inputs) {
      if (!r && in.requires_grad()) r = reaches[index.at(in.id())] != 0;
    }
    reaches[i] = r;
  }

  GradModeGuard mode(create_graph);
  std::vector<Var> acc(order.size());
  if (!order.empty()) acc.back() = constant(Array::full(output.shape(), 1.0));

  std::vector<char> want;
  std::vector<Var> contrib;
  for (std::size_t i = order.size(); i-- > 0;) {
    const Var& v = *order[i];
    if (!acc[i].defined() || !reaches[i] || v.is_leaf()) continue;
    const auto& inputs = v.node()->inputs;
    want.assign(inputs.size(), 0);
    bool any = false;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (inputs[k].requires_grad() && reaches[index.at(inputs[k].id())]) {
        want[k] = 1;
        any = true;
      }
    }
    if (!any) continue;
    contrib.assign(inputs.size(), Var());
    v.node()->backward(acc[i], v, inputs, want, contrib);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (!want[k] || !contrib[k].defined()) continue;
      Var& slot = acc[index.at(inputs[k].id())];
      slot = slot.defined() ? add(slot, contrib[k]) : contrib[k];
    }
    // Release interior gradients that are not requested.
    if (!targets.count(v.id())) acc[i] = Var();
  }

  Gradients out;
  out.values.reserve(wrt.size());
  out.unreachable.reserve(wrt.size());
  for (const auto& w : wrt) {
    auto it = w.defined() ? index.find(w.id()) : index.end();
    if (it != index.end() && acc[it->second].defined()) {
      Var g = acc[it->second];
      if (!create_graph && g.requires_grad()) g = detach(g);
      out.values.push_back(g);
      out.unreachable.push_back(false);
    } else {
      out.values.push_back(constant(Array::zeros(w.defined() ? w.shape() : Shape{1})));
      out.unreachable.push_back(true);
    }
  }
  return out;
}

}  // namespace cfre::ad
