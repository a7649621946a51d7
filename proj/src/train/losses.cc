// src/train/losses.cc

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

#include "speechchain/train/losses.h"

#include <algorithm>

#include "speechchain/errors.h"

namespace speechchain::train {

using ad::Tape;
using ad::Var;

Matrix SpecAugmentMask(int rows, int cols, const SpecAugmentPolicy& policy, Rng& rng) {
  policy.Validate();
  Matrix mask(rows, cols, 1.0);
  auto draw = [&rng](int max_width, int extent, int* start) {
    const int w = std::uniform_int_distribution<int>(0, std::min(max_width, extent))(rng);
    *start = std::uniform_int_distribution<int>(0, extent - w)(rng);
    return w;
  };
  for (int m = 0; m < policy.time_masks; ++m) {
    int t0 = 0;
    const int w = draw(policy.time_width, rows, &t0);
    for (int t = t0; t < t0 + w; ++t)
      for (int c = 0; c < cols; ++c) mask(t, c) = 0.0;
  }
  for (int m = 0; m < policy.freq_masks; ++m) {
    int c0 = 0;
    const int w = draw(policy.freq_width, cols, &c0);
    for (int t = 0; t < rows; ++t)
      for (int c = c0; c < c0 + w; ++c) mask(t, c) = 0.0;
  }
  return mask;
}

Var SpecAugment(Var features, const SpecAugmentPolicy& policy, Rng& rng) {
  Matrix mask = SpecAugmentMask(features.rows(), features.cols(), policy, rng);
  return ad::Mul(features, features.tape()->Constant(std::move(mask)));
}

CycleTerms CycleLoss(Tape& tape, const AsrModel& asr, const TtsModel& tts,
                     const corpus::PhonemeSequence& text, const Matrix& reference_embedding,
                     const SpecAugmentPolicy* policy, Rng* rng) {
  CycleTerms out;
  out.synthesis = tts.Synthesize(tape, text, reference_embedding, SynthesisMode::kFree);
  Var x = out.synthesis.features;
  if (policy != nullptr) {
    if (rng == nullptr) throw ContractError("SpecAugment needs a random stream");
    x = SpecAugment(x, *policy, *rng);
  }
  out.loss = asr.CeLoss(tape, x, text);
  return out;
}

Var SpeakerConsistencyLoss(Tape& tape, const SpeakerEmbedder& speaker, Var synthesized,
                           const Matrix& reference_embedding) {
  Var s_hat = speaker.Embed(tape, synthesized);
  return ad::Scale(ad::CosineSimilarity(s_hat, tape.Constant(reference_embedding)), -1.0);
}

JointTerms JointLoss(Tape& tape, const AsrModel& asr, const TtsModel& tts,
                     const SpeakerEmbedder& speaker, const corpus::PhonemeSequence& text,
                     const Matrix& reference_embedding, double alpha, bool use_speaker_consistency,
                     const SpecAugmentPolicy* policy, Rng* rng) {
  CycleTerms cycle = CycleLoss(tape, asr, tts, text, reference_embedding, policy, rng);
  JointTerms out;
  out.cycle = cycle.loss.value()[0];
  out.total = cycle.loss;
  if (use_speaker_consistency) {
    Var sc = SpeakerConsistencyLoss(tape, speaker, cycle.synthesis.features, reference_embedding);
    out.speaker = sc.value()[0];
    out.total = ad::Add(cycle.loss, ad::Scale(sc, alpha));
  }
  return out;
}

}  // namespace speechchain::train
