// src/ad/gradcheck.cc

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

#include "speechchain/ad/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "speechchain/errors.h"

namespace speechchain::ad {

GradCheckResult FiniteDiffCheck(const std::function<Var(Tape&)>& loss,
                                std::span<Parameter* const> inputs,
                                const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon <= 1e-2))
    throw ContractError("FiniteDiffCheck: epsilon must lie in (0, 1e-2]");
  for (Parameter* p : inputs) p->grad.SetZero();
  {
    Tape tape;
    Var root = loss(tape);
    tape.Backward(root);
    tape.AccumulateParamGrads();
  }
  auto evaluate = [&]() {
    Tape tape(false);
    Var root = loss(tape);
    if (root.rows() != 1 || root.cols() != 1)
      throw ContractError("FiniteDiffCheck: loss is not scalar");
    return root.value()[0];
  };

  const double floor = options.floor * std::max(1.0, std::abs(evaluate()));
  GradCheckResult result;
  Rng rng(options.seed);
  for (Parameter* p : inputs) {
    std::vector<int> coords(p->value.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_input > 0 &&
        static_cast<int>(coords.size()) > options.max_coords_per_input) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_input);
      std::sort(coords.begin(), coords.end());
    }
    for (int i : coords) {
      const double saved = p->value[i];
      p->value[i] = saved + options.epsilon;
      const double up = evaluate();
      p->value[i] = saved - options.epsilon;
      const double down = evaluate();
      p->value[i] = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double analytic = p->grad[i];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++result.coordinates;
      if (rel > result.max_rel_error || result.worst.empty()) {
        result.max_rel_error = std::max(result.max_rel_error, rel);
        if (rel >= result.max_rel_error) {
          std::ostringstream os;
          os << p->name << "[" << i << "] analytic=" << analytic << " numeric=" << numeric;
          result.worst = os.str();
        }
      }
    }
  }
  result.passed = result.max_rel_error < options.tolerance;
  return result;
}

}  // namespace speechchain::ad
