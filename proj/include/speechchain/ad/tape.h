// include/speechchain/ad/tape.h

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

#ifndef SPEECHCHAIN_AD_TAPE_H_
#define SPEECHCHAIN_AD_TAPE_H_

#include <deque>
#include <functional>
#include <initializer_list>
#include <unordered_map>
#include <vector>

#include "speechchain/ad/matrix.h"
#include "speechchain/ad/param.h"

namespace speechchain::ad {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape
// lives.
class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  bool requires_grad() const;
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Records primitive applications in creation order, which is a topological
// order of the computation, and replays their derivative rules in reverse.
// Each node is visited at most once per backward pass. Nodes that no
// gradient-requiring leaf can reach carry no backward rule at all.
//
// A tape built with grad_enabled = false records values only; this is the
// inference path.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Matrix value);
  Var Leaf(Matrix value, bool requires_grad = true);
  // Binds a Parameter. Repeated calls return the same node, so reuse of a
  // parameter accumulates its gradient. Frozen parameters bind as constants.
  Var Param(Parameter& p);

  Var Record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var Record(Matrix value, const std::vector<Var>& inputs, BackwardFn fn);

  const Matrix& value(int id) const { return nodes_[id].value; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  // Gradient buffer of a node, allocated as zeros on first access.
  Matrix& grad(int id);
  bool has_grad(int id) const { return !nodes_[id].grad.empty(); }
  // Gradient of the root with respect to `v`; zeros when nothing reached it.
  Matrix Grad(Var v) const;

  // Root must be 1 x 1. May run once per tape.
  void Backward(Var root);
  // Adds gradients of bound parameter leaves into Parameter::grad.
  void AccumulateParamGrads() const;

  bool grad_enabled() const { return grad_enabled_; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
  std::vector<std::pair<Parameter*, int>> bound_;
  std::unordered_map<const Parameter*, int> bound_index_;
  bool grad_enabled_;
  bool backward_done_ = false;
};

}  // namespace speechchain::ad

#endif  // SPEECHCHAIN_AD_TAPE_H_
