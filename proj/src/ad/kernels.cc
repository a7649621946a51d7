// src/ad/kernels.cc

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

#include "speechchain/ad/kernels.h"

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace speechchain::kernels {

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

void GemmNN(int m, int k, int n, const double* a, const double* b, double* c) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = c[i * n + j];
      for (int p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = acc;
    }
}

void GemmNT(int m, int k, int n, const double* a, const double* b, double* c) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = c[i * n + j];
      for (int p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
      c[i * n + j] = acc;
    }
}

void GemmTN(int m, int k, int n, const double* a, const double* b, double* c) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = c[i * n + j];
      for (int p = 0; p < k; ++p) acc += a[p * m + i] * b[p * n + j];
      c[i * n + j] = acc;
    }
}

void PairwiseSquaredDistances(const double* a, int na, const double* b, int nb,
                              int dim, double* out) {
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      double acc = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double diff = a[i * dim + d] - b[j * dim + d];
        acc += diff * diff;
      }
      out[i * nb + j] = acc;
    }
}

}  // namespace serial

// The row loops below keep k ascending per output element (i-k-j order
// streams B and C rows contiguously while preserving the reduction order).

void GemmNN(int m, int k, int n, const double* a, const double* b, double* c) {
  const long work = static_cast<long>(m) * k * n;
#pragma omp parallel for schedule(static) if (work >= kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    double* ci = c + static_cast<long>(i) * n;
    const double* ai = a + static_cast<long>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = b + static_cast<long>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void GemmNT(int m, int k, int n, const double* a, const double* b, double* c) {
  // Transposing B once lets the row loop stream contiguous memory like GemmNN.
  std::vector<double> bt(static_cast<size_t>(k) * n);
  for (int j = 0; j < n; ++j)
    for (int p = 0; p < k; ++p) bt[static_cast<size_t>(p) * n + j] = b[static_cast<size_t>(j) * k + p];
  GemmNN(m, k, n, a, bt.data(), c);
}

void GemmTN(int m, int k, int n, const double* a, const double* b, double* c) {
  const long work = static_cast<long>(m) * k * n;
#pragma omp parallel for schedule(static) if (work >= kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    double* ci = c + static_cast<long>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double api = a[static_cast<long>(p) * m + i];
      const double* bp = b + static_cast<long>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

void PairwiseSquaredDistances(const double* a, int na, const double* b, int nb,
                              int dim, double* out) {
  const long work = static_cast<long>(na) * nb * dim;
#pragma omp parallel for schedule(static) if (work >= kParallelThreshold)
  for (int i = 0; i < na; ++i) {
    const double* ai = a + static_cast<long>(i) * dim;
    for (int j = 0; j < nb; ++j) {
      const double* bj = b + static_cast<long>(j) * dim;
      double acc = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double diff = ai[d] - bj[d];
        acc += diff * diff;
      }
      out[static_cast<long>(i) * nb + j] = acc;
    }
  }
}

}  // namespace speechchain::kernels
