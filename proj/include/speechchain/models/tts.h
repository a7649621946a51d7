// include/speechchain/models/tts.h

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

#ifndef SPEECHCHAIN_MODELS_TTS_H_
#define SPEECHCHAIN_MODELS_TTS_H_

#include <vector>

#include "speechchain/ad/ops.h"
#include "speechchain/ad/param.h"
#include "speechchain/corpus/phonemes.h"
#include "speechchain/corpus/synth.h"
#include "speechchain/nn/blocks.h"

namespace speechchain {

struct TtsConfig {
  nn::BlockConfig encoder{32, 2, 64, 2};
  nn::BlockConfig decoder{32, 2, 64, 2};
  int feature_dim = corpus::kFeatureDim;
  int speaker_dim = 16;
  int predictor_hidden = 32;
  int postnet_channels = 32;
  int postnet_kernel = 5;

  void Validate() const;
};

// Partition names.
inline constexpr const char* kTtsEncoder = "tts.enc";
inline constexpr const char* kTtsVarianceAdaptor = "tts.va";
inline constexpr const char* kTtsDuration = "tts.va/duration/";
inline constexpr const char* kTtsDecoder = "tts.dec";
inline constexpr const char* kTtsPostnet = "tts.post";

enum class SynthesisMode { kTeacher, kFree };

struct SynthesisOutput {
  ad::Var features;          // post-net output, T x F
  ad::Var decoder_features;  // before the post-net, T x F
  ad::Var pitch;             // predicted, L x 1
  ad::Var energy;            // predicted, L x 1
  ad::Var duration;          // predicted, L x 1, raw frames
  std::vector<int> frames_per_token;  // durations used by the length regulator
};

// Two-layer per-phoneme regressor producing one value per row.
class VariancePredictor {
 public:
  VariancePredictor() = default;
  VariancePredictor(ParamSet& params, const std::string& name, int in, int hidden, Rng& rng);
  ad::Var Forward(ad::Tape& tape, ad::Var x) const;

 private:
  nn::Linear hidden_, out_;
};

// Non-autoregressive multi-speaker synthesizer. The speaker embedding is
// projected and added to every encoder row; pitch and energy are predicted
// per phoneme, projected and added; the length regulator expands phonemes to
// frames; a non-causal decoder and a two-layer convolutional post-net give
// the output.
class TtsModel {
 public:
  TtsModel(const TtsConfig& config, uint64_t seed);
  TtsModel(TtsModel&&) = default;

  const TtsConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  // Teacher mode uses `targets` for pitch, energy and duration; free mode
  // predicts them, rounding durations and clamping at one frame. Predicted
  // durations never carry gradient into the output.
  SynthesisOutput Synthesize(ad::Tape& tape, const corpus::PhonemeSequence& text,
                             const Matrix& speaker_embedding, SynthesisMode mode,
                             const corpus::ProsodyTrack* targets = nullptr) const;
  Matrix SynthesizeFree(const corpus::PhonemeSequence& text, const Matrix& speaker_embedding) const;

 private:
  TtsConfig config_;
  ParamSet params_;
  Parameter* embedding_ = nullptr;
  nn::TransformerEncoder encoder_;
  nn::Linear speaker_proj_;
  VariancePredictor pitch_, energy_, duration_;
  nn::Linear pitch_proj_, energy_proj_;
  nn::TransformerEncoder decoder_;
  nn::Linear output_;
  nn::Conv1d post1_, post2_;
};

struct TtsLossTerms {
  ad::Var total;
  double features = 0.0;
  double decoder_features = 0.0;
  double pitch = 0.0;
  double energy = 0.0;
  double duration = 0.0;
};

// |X - X^|_1 + |X - X^_D|_1 + |p - p^|^2 + |e - e^|^2 + |d - d^|^2.
// ShapeError if the output frames do not match X.
TtsLossTerms TtsLoss(ad::Tape& tape, const SynthesisOutput& out, const Matrix& features,
                     const corpus::ProsodyTrack& prosody);

}  // namespace speechchain

#endif  // SPEECHCHAIN_MODELS_TTS_H_
