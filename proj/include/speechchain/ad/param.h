// include/speechchain/ad/param.h

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

#ifndef SPEECHCHAIN_AD_PARAM_H_
#define SPEECHCHAIN_AD_PARAM_H_

#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "speechchain/ad/matrix.h"

namespace speechchain {

using Rng = std::mt19937_64;

// A trainable array. `grad` has the shape of `value` and accumulates across
// backward passes until ZeroGrad(). Frozen parameters enter a graph as
// constants, so they never receive gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  bool frozen = false;
};

// Partition of a parameter name: the prefix before the first '/'.
// "tts.va/duration/w" belongs to partition "tts.va".
std::string PartitionOf(std::string_view name);

// Named parameters in a stable, sorted order. Addresses of stored Parameters
// never change, so layers may keep raw pointers into the set.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(const ParamSet&) = delete;
  ParamSet& operator=(const ParamSet&) = delete;

  Parameter& Add(const std::string& name, Matrix init);
  Parameter& Get(const std::string& name);
  const Parameter& Get(const std::string& name) const;
  bool Contains(const std::string& name) const { return params_.count(name) > 0; }
  void Remove(const std::string& prefix);

  std::vector<Parameter*> All();
  std::vector<const Parameter*> All() const;
  // Parameters whose name starts with `prefix`.
  std::vector<Parameter*> WithPrefix(std::string_view prefix);
  std::vector<std::string> Partitions() const;

  void SetFrozen(std::string_view prefix, bool frozen);
  bool AllFrozen(std::string_view prefix) const;
  void ZeroGrad();
  long Count() const;

  std::map<std::string, Matrix> Snapshot() const;
  // Copies values for every name in `values`; throws on unknown names or
  // shape mismatch. Missing names are left untouched.
  void Restore(const std::map<std::string, Matrix>& values);

 private:
  std::map<std::string, std::unique_ptr<Parameter>> params_;
};

// Draws an array with entries N(0, stddev^2).
Matrix RandomNormal(int rows, int cols, double stddev, Rng& rng);

}  // namespace speechchain

#endif  // SPEECHCHAIN_AD_PARAM_H_
