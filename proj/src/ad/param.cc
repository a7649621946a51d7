// src/ad/param.cc

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

#include "speechchain/ad/param.h"

#include <set>

#include "speechchain/errors.h"

namespace speechchain {

std::string PartitionOf(std::string_view name) {
  const auto slash = name.find('/');
  return std::string(slash == std::string_view::npos ? name : name.substr(0, slash));
}

Parameter& ParamSet::Add(const std::string& name, Matrix init) {
  if (params_.count(name)) throw ContractError("duplicate parameter name " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->grad = Matrix(init.rows(), init.cols());
  p->value = std::move(init);
  Parameter& ref = *p;
  params_.emplace(name, std::move(p));
  return ref;
}

Parameter& ParamSet::Get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("unknown parameter " + name);
  return *it->second;
}

const Parameter& ParamSet::Get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("unknown parameter " + name);
  return *it->second;
}

void ParamSet::Remove(const std::string& prefix) {
  for (auto it = params_.begin(); it != params_.end();) {
    if (it->first.starts_with(prefix))
      it = params_.erase(it);
    else
      ++it;
  }
}

std::vector<Parameter*> ParamSet::All() {
  std::vector<Parameter*> out;
  for (auto& [_, p] : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParamSet::All() const {
  std::vector<const Parameter*> out;
  for (const auto& [_, p] : params_) out.push_back(p.get());
  return out;
}

std::vector<Parameter*> ParamSet::WithPrefix(std::string_view prefix) {
  std::vector<Parameter*> out;
  for (auto& [name, p] : params_)
    if (name.starts_with(prefix)) out.push_back(p.get());
  return out;
}

std::vector<std::string> ParamSet::Partitions() const {
  std::set<std::string> names;
  for (const auto& [name, _] : params_) names.insert(PartitionOf(name));
  return {names.begin(), names.end()};
}

void ParamSet::SetFrozen(std::string_view prefix, bool frozen) {
  for (auto& [name, p] : params_)
    if (name.starts_with(prefix)) p->frozen = frozen;
}

bool ParamSet::AllFrozen(std::string_view prefix) const {
  bool any = false;
  for (const auto& [name, p] : params_)
    if (name.starts_with(prefix)) {
      any = true;
      if (!p->frozen) return false;
    }
  return any;
}

void ParamSet::ZeroGrad() {
  for (auto& [_, p] : params_) p->grad.SetZero();
}

long ParamSet::Count() const {
  long n = 0;
  for (const auto& [_, p] : params_) n += p->value.size();
  return n;
}

std::map<std::string, Matrix> ParamSet::Snapshot() const {
  std::map<std::string, Matrix> out;
  for (const auto& [name, p] : params_) out.emplace(name, p->value);
  return out;
}

void ParamSet::Restore(const std::map<std::string, Matrix>& values) {
  for (const auto& [name, m] : values) {
    Parameter& p = Get(name);
    if (!p.value.SameShape(m))
      throw ShapeError("restore " + name + ": " + p.value.ShapeString() + " vs " + m.ShapeString());
    p.value = m;
  }
}

Matrix RandomNormal(int rows, int cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m[i] = dist(rng);
  return m;
}

}  // namespace speechchain
