// include/speechchain/train/losses.h

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

#ifndef SPEECHCHAIN_TRAIN_LOSSES_H_
#define SPEECHCHAIN_TRAIN_LOSSES_H_

#include "speechchain/ad/ops.h"
#include "speechchain/models/asr.h"
#include "speechchain/models/speaker.h"
#include "speechchain/models/tts.h"
#include "speechchain/train/config.h"

namespace speechchain::train {

// 0/1 keep mask for a rows x cols feature matrix.
Matrix SpecAugmentMask(int rows, int cols, const SpecAugmentPolicy& policy, Rng& rng);
// Multiplies by a freshly drawn mask; gradient flows through kept cells.
ad::Var SpecAugment(ad::Var features, const SpecAugmentPolicy& policy, Rng& rng);

struct CycleTerms {
  ad::Var loss;
  SynthesisOutput synthesis;
};

// Synthesizes `text` in free mode for the reference speaker, optionally
// masks the result, and scores the text under the recognizer. Pass a null
// policy to skip masking.
CycleTerms CycleLoss(ad::Tape& tape, const AsrModel& asr, const TtsModel& tts,
                     const corpus::PhonemeSequence& text, const Matrix& reference_embedding,
                     const SpecAugmentPolicy* policy, Rng* rng);

// -cos(embed(synthesized), reference_embedding).
ad::Var SpeakerConsistencyLoss(ad::Tape& tape, const SpeakerEmbedder& speaker,
                               ad::Var synthesized, const Matrix& reference_embedding);

struct JointTerms {
  ad::Var total;
  double cycle = 0.0;
  double speaker = 0.0;  // 0 when the speaker term is off
};

// cycle + alpha * speaker consistency. The speaker term scores the unmasked
// synthesis.
JointTerms JointLoss(ad::Tape& tape, const AsrModel& asr, const TtsModel& tts,
                     const SpeakerEmbedder& speaker, const corpus::PhonemeSequence& text,
                     const Matrix& reference_embedding, double alpha, bool use_speaker_consistency,
                     const SpecAugmentPolicy* policy, Rng* rng);

}  // namespace speechchain::train

#endif  // SPEECHCHAIN_TRAIN_LOSSES_H_
