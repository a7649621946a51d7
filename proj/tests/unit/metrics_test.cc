// tests/unit/metrics_test.cc

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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles/brute_force.h"
#include "speechchain/ad/param.h"
#include "speechchain/errors.h"
#include "speechchain/metrics/metrics.h"

namespace speechchain::metrics {
namespace {

std::vector<int> RandomSeq(std::mt19937_64& rng, int max_len, int alphabet) {
  std::uniform_int_distribution<int> len(0, max_len), sym(0, alphabet - 1);
  std::vector<int> s(len(rng));
  for (int& v : s) v = sym(rng);
  return s;
}

TEST(Per, Examples) {
  const std::vector<int> a = {4, 5, 6, 7};
  EXPECT_EQ(PhonemeErrorRate(a, a), 0.0);
  EXPECT_EQ(PhonemeErrorRate(a, std::vector<int>{4, 5, 9, 7}), 25.0);
  EXPECT_EQ(PhonemeErrorRate(a, std::vector<int>{}), 100.0);
  EXPECT_THROW(PhonemeErrorRate(std::vector<int>{}, a), ContractError);
}

TEST(Per, MatchesEditScriptEnumeration) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    auto a = RandomSeq(rng, 6, 4), b = RandomSeq(rng, 6, 4);
    EXPECT_EQ(EditDistance(a, b), oracle::MinEditScript(a, b));
  }
}

TEST(Dtw, IdenticalSequencesGiveZeroAndDiagonal) {
  Matrix a = Matrix::FromRows({{1, 2}, {3, 1}, {0, 5}});
  DtwResult r = DtwFeatures(a, a);
  EXPECT_EQ(r.cost, 0.0);
  AlignmentPath diag = {{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(r.path, diag);
}

TEST(Dtw, RepetitionAbsorbed) {
  DtwResult r = DtwFeatures(Matrix(1, 1, 0.0), Matrix(3, 1, 0.0));
  EXPECT_EQ(r.cost, 0.0);
  AlignmentPath want = {{0, 0}, {0, 1}, {0, 2}};
  EXPECT_EQ(r.path, want);
}

TEST(Dtw, MatchesExhaustivePathEnumeration) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 3);
  for (int n = 1; n <= 5; ++n)
    for (int m = 1; m <= 5; ++m)
      for (int draw = 0; draw < 20; ++draw) {
        std::vector<double> d(n * m);
        for (double& v : d) v = draw % 2 ? u(rng) : small(rng);
        auto dist = [&](int i, int j) { return d[i * m + j]; };
        DtwResult r = Dtw(n, m, dist);
        EXPECT_EQ(r.cost, oracle::MinPathCost(n, m, dist));
        double along = 0.0;
        for (auto [i, j] : r.path) along += dist(i, j);
        EXPECT_EQ(along, r.cost);
        EXPECT_EQ(r.path.front(), std::make_pair(0, 0));
        EXPECT_EQ(r.path.back(), std::make_pair(n - 1, m - 1));
        for (size_t k = 1; k < r.path.size(); ++k) {
          const int di = r.path[k].first - r.path[k - 1].first;
          const int dj = r.path[k].second - r.path[k - 1].second;
          EXPECT_TRUE((di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1));
        }
      }
}

TEST(Dtw, CostSymmetricUnderSwap) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = RandomNormal(1 + trial % 7, 3, 1.0, rng);
    Matrix b = RandomNormal(1 + trial % 5, 3, 1.0, rng);
    EXPECT_NEAR(DtwFeatures(a, b).cost, DtwFeatures(b, a).cost, 1e-12);
  }
}

TEST(Mcd, ZeroForIdenticalAndForUniformGain) {
  std::mt19937_64 rng(1);
  Matrix x(6, 16);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
  EXPECT_EQ(MelCepstralDistortion(x, x), 0.0);
  Matrix g = x;
  for (int i = 0; i < g.size(); ++i) g[i] *= 3.7;
  EXPECT_NEAR(MelCepstralDistortion(x, g), 0.0, 1e-12);
  Matrix y = x;
  y(2, 5) *= 1.5;
  EXPECT_GT(MelCepstralDistortion(x, y), 0.0);
}

TEST(Mcd, SingleFrameHandComputation) {
  // F = 4, order 3: c_k = sqrt(2/4) sum_n log x_n cos(pi k (n + 0.5) / 4).
  Matrix a = Matrix::FromRows({{1.0, 2.0, 4.0, 8.0}});
  Matrix b = Matrix::FromRows({{1.0, 1.0, 1.0, 1.0}});
  const double l2 = std::log(2.0);
  double sq = 0.0;
  for (int k = 1; k <= 3; ++k) {
    double c = 0.0;
    for (int n = 0; n < 4; ++n) c += n * l2 * std::cos(std::numbers::pi * k * (n + 0.5) / 4);
    c *= std::sqrt(0.5);
    sq += c * c;
  }
  const double want = 10.0 / std::log(10.0) * std::sqrt(2.0 * sq);
  EXPECT_NEAR(MelCepstralDistortion(a, b, 3), want, 1e-12);
}

TEST(Mcd, NonPositiveValuesAreFloored) {
  Matrix a(2, 16, 0.0), b(2, 16, -1.0);
  EXPECT_EQ(MelCepstralDistortion(a, b), 0.0);
}

TEST(F0Rmse, ZeroAndConstantOffset) {
  std::mt19937_64 rng(5);
  Matrix x = RandomNormal(7, 16, 1.0, rng);
  EXPECT_EQ(F0Rmse(x, x, 0), 0.0);
  Matrix y = x;
  for (int t = 0; t < 7; ++t) y(t, 0) += 0.25;
  EXPECT_NEAR(F0Rmse(x, y, 0), 0.25, 1e-12);
}

TEST(F0Rmse, MatchesRecomputationAlongIndependentPath) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x = RandomNormal(2 + trial % 4, 3, 1.0, rng);
    Matrix y = RandomNormal(1 + trial % 5, 3, 1.0, rng);
    auto dist = [&](int i, int j) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += (x(i, c) - y(j, c)) * (x(i, c) - y(j, c));
      return std::sqrt(s);
    };
    // Best path by enumeration.
    double best = 1e300;
    oracle::Path best_path;
    oracle::EnumeratePaths(x.rows(), y.rows(), [&](const oracle::Path& p) {
      double c = 0.0;
      for (auto [i, j] : p) c += dist(i, j);
      if (c < best - 1e-12) best = c, best_path = p;
    });
    double s = 0.0;
    for (auto [i, j] : best_path) s += std::pow(x(i, 0) - y(j, 0), 2);
    EXPECT_NEAR(F0Rmse(x, y, 0), std::sqrt(s / best_path.size()), 1e-12);
  }
}

TEST(Report, RowHasTableColumns) {
  MetricsReport r;
  r.per_percent = 12.5;
  r.mcd_db = 3.25;
  const std::string row = FormatRow("Proposed", r);
  EXPECT_NE(row.find("PER (%)"), std::string::npos);
  EXPECT_NE(row.find("MCD (dB)"), std::string::npos);
  EXPECT_NE(row.find("F0 RMSE"), std::string::npos);
  EXPECT_EQ(ToJson(r)["per_percent"], 12.5);
}

}  // namespace
}  // namespace speechchain::metrics
