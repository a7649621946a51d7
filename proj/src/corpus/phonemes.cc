// src/corpus/phonemes.cc

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

#include "speechchain/corpus/phonemes.h"

#include <cmath>
#include <utility>
#include <vector>

#include "speechchain/errors.h"

namespace speechchain::corpus {
namespace {

std::vector<TokenAcoustics> BuildTable() {
  std::vector<TokenAcoustics> table(kVocabSize);
  TokenAcoustics& silence = table[kSpace];
  for (int c = 1; c < kFeatureDim; ++c) silence.spectrum[c] = 0.05;
  silence.duration = 1;
  silence.pitch_factor = 0.0;

  // Two spectral peaks per phoneme at distinct channel pairs, enumerated by
  // peak separation.
  std::vector<std::pair<int, int>> peaks;
  for (int gap : {5, 7, 3})
    for (int first = 1; first + gap < kFeatureDim; ++first) peaks.emplace_back(first, first + gap);
  if (static_cast<int>(peaks.size()) < kPhonemeCount)
    throw ContractError("not enough distinct spectral peak pairs");
  for (int p = 0; p < kPhonemeCount; ++p) {
    const auto [first, second] = peaks[p];
    TokenAcoustics& a = table[kFirstPhoneme + p];
    const double amp1 = 0.6 + 0.1 * (p % 5);
    const double amp2 = 0.4 + 0.15 * (p % 3);
    for (int c = 1; c < kFeatureDim; ++c) {
      const double d1 = c - first, d2 = c - second;
      a.spectrum[c] = 0.05 + amp1 * std::exp(-0.5 * d1 * d1) + amp2 * std::exp(-0.5 * d2 * d2);
    }
    a.duration = 2 + p % 5;
    a.pitch_factor = 0.85 + 0.05 * (p % 7);
  }
  return table;
}

}  // namespace

const TokenAcoustics& AcousticsOf(int token) {
  static const std::vector<TokenAcoustics> table = BuildTable();
  if (!IsTextToken(token)) throw ContractError("token " + std::to_string(token) + " is not renderable");
  return table[token];
}

std::string TokenName(int token) {
  switch (token) {
    case kPad: return "<pad>";
    case kBos: return "<s>";
    case kEos: return "</s>";
    case kSpace: return "|";
    default:
      if (IsPhoneme(token)) return "p" + std::to_string(token - kFirstPhoneme);
      return "<unk:" + std::to_string(token) + ">";
  }
}

std::string FormatSequence(const PhonemeSequence& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += TokenName(tokens[i]);
  }
  return out;
}

}  // namespace speechchain::corpus
