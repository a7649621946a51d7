// include/speechchain/metrics/metrics.h

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

#ifndef SPEECHCHAIN_METRICS_METRICS_H_
#define SPEECHCHAIN_METRICS_METRICS_H_

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "speechchain/ad/matrix.h"

namespace speechchain::metrics {

// Levenshtein distance with unit costs.
int EditDistance(std::span<const int> a, std::span<const int> b);

// 100 * EditDistance(ref, hyp) / |ref|. ContractError on an empty reference.
double PhonemeErrorRate(std::span<const int> reference, std::span<const int> hypothesis);

using AlignmentPath = std::vector<std::pair<int, int>>;

struct DtwResult {
  double cost = 0.0;
  AlignmentPath path;
};

// Minimal cumulative cost over monotone paths from (0, 0) to (n-1, m-1) with
// steps (1,0), (0,1), (1,1). Ties prefer the diagonal, then (0,1), then (1,0).
DtwResult Dtw(int n, int m, const std::function<double(int, int)>& frame_dist);
// DTW over rows with Euclidean frame distance.
DtwResult DtwFeatures(const Matrix& a, const Matrix& b);

inline constexpr int kDefaultCepstralOrder = 8;
inline constexpr double kLogFloor = 1e-10;

// Cepstral coefficients c_1..c_order of each row: orthonormal DCT-II of
// log(max(x, floor)).
Matrix Cepstra(const Matrix& features, int order = kDefaultCepstralOrder);

// Mean of (10 / ln 10) * sqrt(2 * sum_k (c_k - c^_k)^2) along the DTW path
// that minimizes that same frame distortion.
double MelCepstralDistortion(const Matrix& reference, const Matrix& synthesized,
                             int order = kDefaultCepstralOrder);

// RMSE of one channel along the DTW path computed on full features.
double F0Rmse(const Matrix& reference, const Matrix& synthesized, int channel);

struct MetricsReport {
  std::string split;
  double per_percent = 0.0;
  double mcd_db = 0.0;
  double f0_rmse = 0.0;
  double perplexity = 0.0;
  int utterances = 0;
  int tokens = 0;
  std::string config_hash;
};

nlohmann::json ToJson(const MetricsReport& r);
// "PER (%) | MCD (dB) | F0 RMSE" style row.
std::string FormatRow(const std::string& method, const MetricsReport& r);

}  // namespace speechchain::metrics

#endif  // SPEECHCHAIN_METRICS_METRICS_H_
