// include/speechchain/models/asr.h

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

#ifndef SPEECHCHAIN_MODELS_ASR_H_
#define SPEECHCHAIN_MODELS_ASR_H_

#include <vector>

#include "speechchain/ad/ops.h"
#include "speechchain/ad/param.h"
#include "speechchain/corpus/phonemes.h"
#include "speechchain/nn/blocks.h"

namespace speechchain {

struct AsrConfig {
  nn::BlockConfig encoder{32, 2, 64, 2};
  nn::BlockConfig decoder{32, 2, 64, 2};
  int feature_dim = corpus::kFeatureDim;
  int subsample = 2;
  // Output head init std; small values give a near-uniform initial posterior.
  double head_init_std = 1e-3;
  // Weight of the auxiliary alignment (CTC) objective used in supervised
  // pretraining. 0 disables the extra head's loss.
  double ctc_weight = 0.3;

  void Validate() const;
};

// Transformer encoder-decoder recognizer. Frames are stacked in groups of
// `subsample` (zero padded at the end), projected to model_dim and encoded;
// the decoder reads BOS + y and predicts y + EOS. Parameters live under
// "asr/".
class AsrModel {
 public:
  AsrModel(const AsrConfig& config, uint64_t seed);
  AsrModel(AsrModel&&) = default;

  const AsrConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  // features: T x F, T >= 1. Returns ceil(T / subsample) x model_dim.
  ad::Var Encode(ad::Tape& tape, ad::Var features) const;
  // Logits (L x V) for next-token prediction given decoder inputs.
  ad::Var DecoderLogits(ad::Tape& tape, ad::Var memory, std::span<const int> inputs) const;

  // Mean over the L = |text| + 1 targets of -log P(target | prefix, X).
  ad::Var CeLoss(ad::Tape& tape, ad::Var features, const corpus::PhonemeSequence& text) const;
  ad::Var CeLossFromMemory(ad::Tape& tape, ad::Var memory, const corpus::PhonemeSequence& text,
                           std::span<const int> inputs) const;

  // Teacher-forced loss where each decoder input after BOS is replaced, with
  // probability `sampling_prob`, by the argmax prediction of a teacher-forced
  // pass. With sampling_prob = 0 this is CeLoss.
  ad::Var ScheduledSamplingLoss(ad::Tape& tape, ad::Var features,
                                const corpus::PhonemeSequence& text, double sampling_prob,
                                Rng& rng) const;

  ad::Var ScheduledSamplingLossFromMemory(ad::Tape& tape, ad::Var memory,
                                          const corpus::PhonemeSequence& text,
                                          double sampling_prob, Rng& rng) const;

  // CTC loss of the encoder-side head per target token (blank = PAD).
  // Returns an unbound Var when the utterance is too short to align.
  ad::Var CtcLossFromMemory(ad::Tape& tape, ad::Var memory,
                            const corpus::PhonemeSequence& text) const;
  // Supervised pretraining objective: (1 - w) * scheduled-sampling CE +
  // w * CTC, w = ctc_weight.
  ad::Var PretrainLoss(ad::Tape& tape, ad::Var features, const corpus::PhonemeSequence& text,
                       double sampling_prob, Rng& rng) const;

  // Row l is P(. | y_<l, X), including the EOS step. Rows sum to one.
  Matrix StepPosteriors(const Matrix& features, const corpus::PhonemeSequence& text) const;
  // Greedy decoding without BOS/EOS in the result. Stops at EOS or after
  // max_len tokens.
  corpus::PhonemeSequence GreedyDecode(const Matrix& features, int max_len) const;
  double Perplexity(const Matrix& features, const corpus::PhonemeSequence& text) const;

 private:
  AsrConfig config_;
  ParamSet params_;
  nn::Linear input_proj_;
  nn::TransformerEncoder encoder_;
  Parameter* embedding_ = nullptr;
  nn::TransformerDecoder decoder_;
  nn::Linear output_;
  nn::Linear ctc_;
};

// Decoder inputs BOS + text and targets text + EOS.
std::vector<int> DecoderInputs(const corpus::PhonemeSequence& text);
std::vector<int> DecoderTargets(const corpus::PhonemeSequence& text);

// Linear ramp from 0 at epoch 0 to `max_prob` at `ramp_epochs`, constant
// after.
double ScheduledSamplingProb(int epoch, int ramp_epochs, double max_prob);

}  // namespace speechchain

#endif  // SPEECHCHAIN_MODELS_ASR_H_
