// src/metrics/metrics.cc

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

#include "speechchain/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "speechchain/errors.h"

namespace speechchain::metrics {

int EditDistance(std::span<const int> a, std::span<const int> b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double PhonemeErrorRate(std::span<const int> reference, std::span<const int> hypothesis) {
  if (reference.empty()) throw ContractError("PER needs a non-empty reference");
  return 100.0 * EditDistance(reference, hypothesis) / static_cast<double>(reference.size());
}

DtwResult Dtw(int n, int m, const std::function<double(int, int)>& frame_dist) {
  if (n < 1 || m < 1) throw ContractError("DTW needs two non-empty sequences");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> acc(static_cast<size_t>(n) * m, inf);
  auto at = [&](int i, int j) -> double& { return acc[static_cast<size_t>(i) * m + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = inf;
        if (i > 0 && j > 0) best = at(i - 1, j - 1);
        if (j > 0) best = std::min(best, at(i, j - 1));
        if (i > 0) best = std::min(best, at(i - 1, j));
      }
      at(i, j) = best + frame_dist(i, j);
    }
  DtwResult r;
  r.cost = at(n - 1, m - 1);
  int i = n - 1, j = m - 1;
  r.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double diag = at(i - 1, j - 1), left = at(i, j - 1), up = at(i - 1, j);
      if (diag <= left && diag <= up) {
        --i, --j;
      } else if (left <= up) {
        --j;
      } else {
        --i;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    r.path.emplace_back(i, j);
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

DtwResult DtwFeatures(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw ShapeError("DTW feature widths differ: " + a.ShapeString() + " vs " + b.ShapeString());
  const int f = a.cols();
  return Dtw(a.rows(), b.rows(), [&](int i, int j) {
    double s = 0.0;
    const double* x = a.data() + static_cast<size_t>(i) * f;
    const double* y = b.data() + static_cast<size_t>(j) * f;
    for (int c = 0; c < f; ++c) s += (x[c] - y[c]) * (x[c] - y[c]);
    return std::sqrt(s);
  });
}

Matrix Cepstra(const Matrix& features, int order) {
  const int f = features.cols();
  if (order < 1 || order >= f) throw ContractError("cepstral order must lie in [1, F)");
  Matrix out(features.rows(), order);
  const double scale = std::sqrt(2.0 / f);
  std::vector<double> logs(f);
  for (int t = 0; t < features.rows(); ++t) {
    for (int n = 0; n < f; ++n) logs[n] = std::log(std::max(features(t, n), kLogFloor));
    for (int k = 1; k <= order; ++k) {
      double s = 0.0;
      for (int n = 0; n < f; ++n) s += logs[n] * std::cos(std::numbers::pi * k * (n + 0.5) / f);
      out(t, k - 1) = scale * s;
    }
  }
  return out;
}

double MelCepstralDistortion(const Matrix& reference, const Matrix& synthesized, int order) {
  if (reference.cols() != synthesized.cols())
    throw ShapeError("MCD feature widths differ: " + reference.ShapeString() + " vs " +
                     synthesized.ShapeString());
  const Matrix a = Cepstra(reference, order);
  const Matrix b = Cepstra(synthesized, order);
  const double k = 10.0 / std::numbers::ln10;
  auto dist = [&](int i, int j) {
    double s = 0.0;
    for (int c = 0; c < order; ++c) s += (a(i, c) - b(j, c)) * (a(i, c) - b(j, c));
    return k * std::sqrt(2.0 * s);
  };
  const DtwResult r = Dtw(a.rows(), b.rows(), dist);
  double total = 0.0;
  for (auto [i, j] : r.path) total += dist(i, j);
  return total / r.path.size();
}

double F0Rmse(const Matrix& reference, const Matrix& synthesized, int channel) {
  if (channel < 0 || channel >= reference.cols()) throw ContractError("F0 channel out of range");
  const DtwResult r = DtwFeatures(reference, synthesized);
  double s = 0.0;
  for (auto [i, j] : r.path) {
    const double d = reference(i, channel) - synthesized(j, channel);
    s += d * d;
  }
  return std::sqrt(s / r.path.size());
}

nlohmann::json ToJson(const MetricsReport& r) {
  return {{"split", r.split},           {"per_percent", r.per_percent},
          {"mcd_db", r.mcd_db},         {"f0_rmse", r.f0_rmse},
          {"perplexity", r.perplexity}, {"utterances", r.utterances},
          {"tokens", r.tokens},         {"config_hash", r.config_hash}};
}

std::string FormatRow(const std::string& method, const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-28s | PER (%%) %6.2f | MCD (dB) %6.3f | F0 RMSE %6.4f",
                method.c_str(), r.per_percent, r.mcd_db, r.f0_rmse);
  return buf;
}

}  // namespace speechchain::metrics
