// src/ad/tape.cc

// Copyright 2026  speechchain authors
//
// See COPYING at the top of the source tree for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "speechchain/ad/tape.h"

#include "speechchain/errors.h"

namespace speechchain::ad {

const Matrix& Var::value() const {
  if (!tape_) throw ContractError("use of an unbound Var");
  return tape_->value(id_);
}

bool Var::requires_grad() const { return tape_ && tape_->requires_grad(id_); }

Var Tape::Constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, nullptr});
  return Var(this, size() - 1);
}

Var Tape::Leaf(Matrix value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), Matrix(), requires_grad && grad_enabled_, nullptr});
  return Var(this, size() - 1);
}

Var Tape::Param(Parameter& p) {
  auto it = bound_index_.find(&p);
  if (it != bound_index_.end()) return Var(this, it->second);
  Var v = Leaf(p.value, !p.frozen);
  bound_index_.emplace(&p, v.id());
  bound_.emplace_back(&p, v.id());
  return v;
}

Var Tape::Record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
  bool needs = false;
  if (grad_enabled_)
    for (const Var& v : inputs) {
      if (v.tape() != this) throw ContractError("operand recorded on a different tape");
      needs = needs || requires_grad(v.id());
    }
  nodes_.push_back(Node{std::move(value), Matrix(), needs, needs ? std::move(fn) : nullptr});
  return Var(this, size() - 1);
}

Var Tape::Record(Matrix value, const std::vector<Var>& inputs, BackwardFn fn) {
  bool needs = false;
  if (grad_enabled_)
    for (const Var& v : inputs) {
      if (v.tape() != this) throw ContractError("operand recorded on a different tape");
      needs = needs || requires_grad(v.id());
    }
  nodes_.push_back(Node{std::move(value), Matrix(), needs, needs ? std::move(fn) : nullptr});
  return Var(this, size() - 1);
}

Matrix& Tape::grad(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

Matrix Tape::Grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::Backward(Var root) {
  if (root.tape() != this) throw ContractError("backward root recorded on a different tape");
  if (root.rows() != 1 || root.cols() != 1)
    throw ContractError("backward requires a scalar root, got " + root.value().ShapeString());
  if (backward_done_) throw ContractError("backward already ran on this tape");
  backward_done_ = true;
  if (!requires_grad(root.id())) return;
  grad(root.id())(0, 0) = 1.0;
  for (int id = root.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, id);
  }
}

void Tape::AccumulateParamGrads() const {
  for (const auto& [p, id] : bound_) {
    const Node& n = nodes_[id];
    if (n.grad.empty() || p->frozen) continue;
    double* dst = p->grad.data();
    const double* src = n.grad.data();
    for (int i = 0; i < n.grad.size(); ++i) dst[i] += src[i];
  }
}

}  // namespace speechchain::ad
