// include/speechchain/ad/kernels.h

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

#ifndef SPEECHCHAIN_AD_KERNELS_H_
#define SPEECHCHAIN_AD_KERNELS_H_

// Dense inner loops used by the autodiff primitives and the metrics. The
// default entry points parallelize over output rows with OpenMP once the
// problem is large enough to amortize a fork; namespace `serial` keeps the
// plain reference loops that the tests and the benchmark compare against.
//
// Every output element is accumulated over the reduction index in ascending
// order in both variants, so results are bitwise identical between them and
// independent of the thread count.

namespace speechchain::kernels {

// C(m x n) += A(m x k) * B(k x n)
void GemmNN(int m, int k, int n, const double* a, const double* b, double* c);
// C(m x n) += A(m x k) * B(n x k)^T
void GemmNT(int m, int k, int n, const double* a, const double* b, double* c);
// C(m x n) += A(k x m)^T * B(k x n)
void GemmTN(int m, int k, int n, const double* a, const double* b, double* c);

// out(na x nb) = squared Euclidean distance between rows of a and rows of b.
void PairwiseSquaredDistances(const double* a, int na, const double* b, int nb,
                              int dim, double* out);

// Minimum work (multiply-adds) before the parallel region is entered.
inline constexpr long kParallelThreshold = 1L << 16;

int MaxThreads();

namespace serial {
void GemmNN(int m, int k, int n, const double* a, const double* b, double* c);
void GemmNT(int m, int k, int n, const double* a, const double* b, double* c);
void GemmTN(int m, int k, int n, const double* a, const double* b, double* c);
void PairwiseSquaredDistances(const double* a, int na, const double* b, int nb,
                              int dim, double* out);
}  // namespace serial

}  // namespace speechchain::kernels

#endif  // SPEECHCHAIN_AD_KERNELS_H_
