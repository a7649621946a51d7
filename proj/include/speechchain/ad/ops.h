// include/speechchain/ad/ops.h

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

#ifndef SPEECHCHAIN_AD_OPS_H_
#define SPEECHCHAIN_AD_OPS_H_

#include <span>
#include <vector>

#include "speechchain/ad/tape.h"

// Differentiable primitives. Every function records one node on the tape of
// its operands and registers the matching derivative rule.
//
// Broadcasting (Add, Sub, Mul): the two operands must agree in each extent
// or have extent 1 there. In practice this covers equal shapes, a 1 x c row
// applied to every row (bias), an r x 1 column applied to every column, and
// a 1 x 1 scalar. Anything else raises ShapeError naming both shapes.

namespace speechchain::ad {

Var MatMul(Var a, Var b);    // a(m x k) * b(k x n)
Var MatMulNT(Var a, Var b);  // a(m x k) * b(n x k)^T
Var Transpose(Var a);

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
Var AddScalar(Var a, double s);

Var Exp(Var a);
Var Log(Var a);  // DomainError on entries <= 0
Var Tanh(Var a);
Var Relu(Var a);
Var Sigmoid(Var a);

// Row-wise softmax and log-softmax; DomainError on non-finite input.
Var SoftmaxRows(Var a);
Var LogSoftmaxRows(Var a);
// Row-wise normalization to zero mean and unit variance followed by a
// per-column affine map; gain and bias are 1 x cols.
Var LayerNormRows(Var x, Var gain, Var bias, double eps = 1e-5);

// Output row i is row indices[i] of `table`, or zeros for index -1. Serves
// embedding lookup, the length regulator and zero-padded shifts. The
// backward pass scatters into a dense gradient.
Var GatherRows(Var table, std::span<const int> indices);
// out(i, 0) = a(i, indices[i]).
Var Pick(Var a, std::span<const int> indices);

Var ConcatCols(const std::vector<Var>& parts);
Var ConcatRows(const std::vector<Var>& parts);
Var SliceRows(Var a, int begin, int count);
Var SliceCols(Var a, int begin, int count);

Var Sum(Var a);          // 1 x 1
Var Mean(Var a);         // 1 x 1
Var MeanOverRows(Var a); // 1 x cols

Var L1Distance(Var a, Var b);         // sum |a - b|
Var SquaredL2Distance(Var a, Var b);  // sum (a - b)^2
Var L2Norm(Var a);                    // sqrt(sum a^2); zero gradient at 0
Var Dot(Var a, Var b);                // sum a * b
// dot(a, b) / max(|a| |b|, eps).
Var CosineSimilarity(Var a, Var b, double eps = 1e-8);

// Elman recurrence over the rows of `input` (T x H, already projected):
// h_t = tanh(input_t + h_{t-1} * recurrent), h_{-1} = 0. With reverse set,
// the scan runs from the last row to the first. Returns all T states.
Var ElmanScan(Var input, Var recurrent, bool reverse);

// Connectionist temporal classification: -log of the total probability of
// every frame labelling that collapses to `labels` once repeats merge and
// `blank` is dropped. `log_probs` is T x V and already log-normalized. Throws
// DomainError when no alignment fits in T frames.
Var CtcLoss(Var log_probs, std::span<const int> labels, int blank);
// Shortest frame count that can carry `labels` (repeats need a blank between).
int CtcMinFrames(std::span<const int> labels);

// Same value, no gradient path.
Var Detach(Var a);

}  // namespace speechchain::ad

#endif  // SPEECHCHAIN_AD_OPS_H_
