// include/speechchain/corpus/phonemes.h

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

#ifndef SPEECHCHAIN_CORPUS_PHONEMES_H_
#define SPEECHCHAIN_CORPUS_PHONEMES_H_

#include <array>
#include <string>
#include <vector>

namespace speechchain::corpus {

// Token inventory shared by the recognizer and the synthesizer.
inline constexpr int kPad = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kSpace = 3;  // word boundary
inline constexpr int kFirstPhoneme = 4;
inline constexpr int kPhonemeCount = 28;
inline constexpr int kVocabSize = kFirstPhoneme + kPhonemeCount;  // 32

// Acoustic frames have kFeatureDim channels; channel kF0Channel carries the
// pitch of voiced frames and is zero in silence.
inline constexpr int kFeatureDim = 16;
inline constexpr int kF0Channel = 0;

// Text as phoneme and word-space tokens, without BOS/EOS.
using PhonemeSequence = std::vector<int>;

inline bool IsPhoneme(int token) {
  return token >= kFirstPhoneme && token < kFirstPhoneme + kPhonemeCount;
}
inline bool IsTextToken(int token) { return token == kSpace || IsPhoneme(token); }

// Rendering attributes of one text token.
struct TokenAcoustics {
  std::array<double, kFeatureDim> spectrum{};  // channel 0 unused
  int duration = 1;                            // frames
  double pitch_factor = 0.0;                   // 0 for silence
};

// Throws ContractError for tokens that cannot appear in text.
const TokenAcoustics& AcousticsOf(int token);

std::string TokenName(int token);
std::string FormatSequence(const PhonemeSequence& tokens);

}  // namespace speechchain::corpus

#endif  // SPEECHCHAIN_CORPUS_PHONEMES_H_
