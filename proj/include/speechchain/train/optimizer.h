// include/speechchain/train/optimizer.h

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

#ifndef SPEECHCHAIN_TRAIN_OPTIMIZER_H_
#define SPEECHCHAIN_TRAIN_OPTIMIZER_H_

#include <map>
#include <span>
#include <string>

#include "speechchain/ad/param.h"

namespace speechchain::train {

enum class OptimizerKind { kAdam, kRAdam };

OptimizerKind ParseOptimizerKind(const std::string& name);  // "adam" | "radam"
std::string OptimizerName(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // global gradient norm cap; 0 disables
};

// Adam, or its variance-rectified form. Moment state is created on the
// first update of a parameter, so frozen parameters never get any.
class Optimizer {
 public:
  explicit Optimizer(const OptimizerConfig& config);

  // Applies one update to every non-frozen parameter from its grad buffer.
  // Returns the global gradient norm before clipping.
  double Step(std::span<Parameter* const> params);

  const OptimizerConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  bool HasState(const std::string& name) const { return state_.count(name) > 0; }
  size_t StateCount() const { return state_.size(); }

  // Flattened state: "<name>#m", "<name>#v", "<name>#t".
  std::map<std::string, Matrix> ExportState() const;
  void ImportState(const std::map<std::string, Matrix>& state);

 private:
  struct Moments {
    Matrix m, v;
    long step = 0;
  };
  OptimizerConfig config_;
  std::map<std::string, Moments> state_;
};

}  // namespace speechchain::train

#endif  // SPEECHCHAIN_TRAIN_OPTIMIZER_H_
