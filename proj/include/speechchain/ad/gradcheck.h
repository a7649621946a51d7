// include/speechchain/ad/gradcheck.h

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

#ifndef SPEECHCHAIN_AD_GRADCHECK_H_
#define SPEECHCHAIN_AD_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "speechchain/ad/param.h"
#include "speechchain/ad/tape.h"

namespace speechchain::ad {

struct GradCheckOptions {
  double epsilon = 1e-6;   // central-difference step, must lie in (0, 1e-2]
  double tolerance = 1e-4; // pass threshold on the worst relative error
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, f)
  // with f = floor * max(1, |loss|), since rounding noise in the difference
  // quotient grows with the magnitude of the loss.
  double floor = 1e-5;
  // Coordinates sampled per input (0 = every coordinate).
  int max_coords_per_input = 0;
  uint64_t seed = 7;
};

struct GradCheckResult {
  bool passed = true;
  double max_rel_error = 0.0;
  int coordinates = 0;
  std::string worst;  // "<name>[index] analytic=... numeric=..."
};

// Compares reverse-mode gradients of the scalar `loss` with central
// differences over the given parameters. `loss` must build the same function
// on every call (seed any randomness inside it). Disagreement is reported in
// the result; it never throws for that reason. Parameter values are restored
// and their grad buffers are left holding the analytic gradient.
GradCheckResult FiniteDiffCheck(const std::function<Var(Tape&)>& loss,
                                std::span<Parameter* const> inputs,
                                const GradCheckOptions& options = {});

}  // namespace speechchain::ad

#endif  // SPEECHCHAIN_AD_GRADCHECK_H_
