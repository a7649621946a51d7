// bench/bench_kernels.cc

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

// Times the OpenMP kernels against the serial reference loops on the shapes
// that dominate training (attention and feed-forward products).

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "speechchain/ad/kernels.h"

namespace {

using Clock = std::chrono::steady_clock;
using GemmFn = void (*)(int, int, int, const double*, const double*, double*);

double TimeGemm(GemmFn fn, int m, int k, int n, int reps) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> dist;
  std::vector<double> a(static_cast<size_t>(m) * k), b(static_cast<size_t>(k) * n),
      c(static_cast<size_t>(m) * n);
  for (double& v : a) v = dist(rng);
  for (double& v : b) v = dist(rng);
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn(m, k, n, a.data(), b.data(), c.data());
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count() / reps;
}

}  // namespace

int main() {
  namespace k = speechchain::kernels;
  std::printf("threads: %d\n", k::MaxThreads());
  std::printf("%-8s %16s %12s %12s %8s\n", "kernel", "shape", "serial_us", "omp_us", "speedup");
  const int shapes[][3] = {{50, 64, 64}, {100, 64, 128}, {100, 128, 64}, {256, 256, 256}};
  const struct {
    const char* name;
    GemmFn serial;
    GemmFn parallel;
  } kernels[] = {{"NN", k::serial::GemmNN, k::GemmNN},
                 {"NT", k::serial::GemmNT, k::GemmNT},
                 {"TN", k::serial::GemmTN, k::GemmTN}};
  for (const auto& kern : kernels)
    for (const auto& s : shapes) {
      const int reps = s[0] * s[1] * s[2] > 1000000 ? 5 : 200;
      const double ts = TimeGemm(kern.serial, s[0], s[1], s[2], reps);
      const double tp = TimeGemm(kern.parallel, s[0], s[1], s[2], reps);
      char shape[32];
      std::snprintf(shape, sizeof shape, "%dx%dx%d", s[0], s[1], s[2]);
      std::printf("%-8s %16s %12.1f %12.1f %8.2f\n", kern.name, shape, ts, tp, ts / tp);
    }
  return 0;
}
