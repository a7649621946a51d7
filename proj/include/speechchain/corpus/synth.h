// include/speechchain/corpus/synth.h

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

#ifndef SPEECHCHAIN_CORPUS_SYNTH_H_
#define SPEECHCHAIN_CORPUS_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "speechchain/ad/matrix.h"
#include "speechchain/ad/param.h"
#include "speechchain/corpus/phonemes.h"

namespace speechchain::corpus {

struct ToySpeaker {
  int id = 0;
  double f0_base = 1.0;
  double spectral_tilt = 0.0;
  double energy_gain = 1.0;
};

// Per-token prosody: pitch and energy in feature units, duration in frames.
struct ProsodyTrack {
  std::vector<double> pitch;
  std::vector<double> energy;
  std::vector<int> duration;
  int size() const { return static_cast<int>(duration.size()); }
};

struct Utterance {
  std::string id;
  int speaker = 0;
  PhonemeSequence text;
  Matrix features;  // frames x kFeatureDim
  ProsodyTrack prosody;
};

struct CorpusConfig {
  int n_speakers = 4;
  int n_paired = 200;
  int n_unpaired = 800;
  int n_validation = 40;
  int n_test = 40;
  int paired_words = 60;  // word inventory of the paired text
  int extra_words = 20;   // words that only occur in unpaired/held-out text
  int min_words = 3;
  int max_words = 10;
  int min_word_length = 2;
  int max_word_length = 5;
  double noise_std = 0.01;  // paired training features only
  uint64_t seed = 1;
};

struct CorpusSplit {
  CorpusConfig config;
  std::vector<ToySpeaker> speakers;
  std::vector<PhonemeSequence> paired_words;
  std::vector<PhonemeSequence> extra_words;
  std::vector<Utterance> paired;
  std::vector<PhonemeSequence> unpaired;
  std::vector<Utterance> validation;
  std::vector<Utterance> test;
};

// Speakers with disjoint per-speaker ranges of every attribute.
std::vector<ToySpeaker> MakeSpeakers(int count, Rng& rng);

// Renders text as frames: each token's spectral template, tilted and scaled
// by the speaker, repeated for the token's duration. Channel kF0Channel holds
// f0_base * pitch factor on voiced frames. Ground-truth pitch is that value,
// energy is the L2 norm of the spectral channels, duration the repeat count.
// When noise_std > 0, Gaussian noise from `noise` is added to the features
// (the prosody stays exact).
struct Rendered {
  Matrix features;
  ProsodyTrack prosody;
};
Rendered Render(const PhonemeSequence& text, const ToySpeaker& speaker, Rng* noise = nullptr,
                double noise_std = 0.0);

// Builds the full corpus reproducibly from config.seed. Paired sentences use
// the paired word inventory; unpaired, validation and test sentences draw
// from the extended inventory, and unpaired ones always contain at least one
// extra word. All sentences in the corpus are distinct.
CorpusSplit MakeSplits(const CorpusConfig& config);

// Recovers durations as run lengths of identical consecutive frames.
std::vector<int> RunLengths(const Matrix& features);

}  // namespace speechchain::corpus

#endif  // SPEECHCHAIN_CORPUS_SYNTH_H_
