// tests/oracles/brute_force.h

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

// Exhaustive reference implementations used to check the dynamic programs.
#ifndef SPEECHCHAIN_TESTS_ORACLES_BRUTE_FORCE_H_
#define SPEECHCHAIN_TESTS_ORACLES_BRUTE_FORCE_H_

#include <algorithm>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace speechchain::oracle {

// Minimum cost over every edit script turning a into b, enumerated without
// memoization: each step matches/substitutes, deletes or inserts one symbol.
inline int MinEditScript(const std::vector<int>& a, const std::vector<int>& b, size_t i = 0,
                         size_t j = 0) {
  if (i == a.size() && j == b.size()) return 0;
  int best = std::numeric_limits<int>::max();
  if (i < a.size() && j < b.size())
    best = std::min(best, (a[i] != b[j]) + MinEditScript(a, b, i + 1, j + 1));
  if (i < a.size()) best = std::min(best, 1 + MinEditScript(a, b, i + 1, j));
  if (j < b.size()) best = std::min(best, 1 + MinEditScript(a, b, i, j + 1));
  return best;
}

using Path = std::vector<std::pair<int, int>>;

// Calls `visit` with every monotone path from (0,0) to (n-1,m-1) using steps
// (1,0), (0,1), (1,1).
inline void EnumeratePaths(int n, int m, const std::function<void(const Path&)>& visit) {
  Path path = {{0, 0}};
  std::function<void()> walk = [&]() {
    auto [i, j] = path.back();
    if (i == n - 1 && j == m - 1) {
      visit(path);
      return;
    }
    const std::pair<int, int> steps[] = {{1, 1}, {0, 1}, {1, 0}};
    for (auto [di, dj] : steps) {
      if (i + di >= n || j + dj >= m) continue;
      path.emplace_back(i + di, j + dj);
      walk();
      path.pop_back();
    }
  };
  walk();
}

// Cost summed along the path in order, and the minimum over all paths.
inline double MinPathCost(int n, int m, const std::function<double(int, int)>& dist,
                          int* path_count = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  int count = 0;
  EnumeratePaths(n, m, [&](const Path& p) {
    double c = 0.0;
    for (auto [i, j] : p) c += dist(i, j);
    best = std::min(best, c);
    ++count;
  });
  if (path_count != nullptr) *path_count = count;
  return best;
}

// Probability that a frame-wise labelling collapses to `labels`, summed over
// all vocab^frames labellings. probs(t, v) must be row-stochastic.
template <typename ProbFn>
double CtcPathSum(int frames, int vocab, int blank, const std::vector<int>& labels,
                  ProbFn probs) {
  std::vector<int> path(frames, 0);
  double total = 0.0;
  while (true) {
    std::vector<int> collapsed;
    for (int t = 0; t < frames; ++t) {
      if (path[t] == blank) continue;
      if (t > 0 && path[t] == path[t - 1]) continue;
      collapsed.push_back(path[t]);
    }
    if (collapsed == labels) {
      double p = 1.0;
      for (int t = 0; t < frames; ++t) p *= probs(t, path[t]);
      total += p;
    }
    int t = 0;
    while (t < frames && ++path[t] == vocab) path[t++] = 0;
    if (t == frames) break;
  }
  return total;
}

}  // namespace speechchain::oracle

#endif  // SPEECHCHAIN_TESTS_ORACLES_BRUTE_FORCE_H_
