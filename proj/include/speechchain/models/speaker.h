// include/speechchain/models/speaker.h

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

#ifndef SPEECHCHAIN_MODELS_SPEAKER_H_
#define SPEECHCHAIN_MODELS_SPEAKER_H_

#include <string>
#include <vector>

#include "speechchain/ad/ops.h"
#include "speechchain/ad/param.h"
#include "speechchain/nn/blocks.h"

namespace speechchain {

struct SpeakerConfig {
  int feature_dim = 16;
  int hidden_dim = 32;     // per direction
  int attention_dim = 16;
  int embedding_dim = 16;

  void Validate() const;
};

// Additive attention pooling: score_t = v . tanh(W h_t + b), weights are the
// softmax of the scores over frames, output is the weighted mean of rows.
class AttentivePooling {
 public:
  AttentivePooling() = default;
  AttentivePooling(ParamSet& params, const std::string& name, int in, int attention_dim,
                   Rng& rng);
  // states: T x in. Returns 1 x in. `weights` receives the 1 x T weights.
  ad::Var Forward(ad::Tape& tape, ad::Var states, Matrix* weights = nullptr) const;

 private:
  nn::Linear score_hidden_;
  Parameter* score_vector_ = nullptr;
};

// Bidirectional Elman encoder over frames, attention pooling, then a linear
// map to the embedding. Parameters live under "speaker/"; the classification
// head used for pretraining lives under "speaker.head/" and is dropped with
// DropHead().
class SpeakerEmbedder {
 public:
  SpeakerEmbedder(const SpeakerConfig& config, uint64_t seed);
  SpeakerEmbedder(SpeakerEmbedder&&) = default;

  const SpeakerConfig& config() const { return config_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  // features: T x F with T >= 1. Returns 1 x embedding_dim.
  ad::Var Embed(ad::Tape& tape, ad::Var features, Matrix* pooling_weights = nullptr) const;
  Matrix Embed(const Matrix& features) const;

  // Classification head over `speaker_count` classes. Returns 1 x count
  // logits.
  void AddHead(int speaker_count, uint64_t seed);
  bool has_head() const { return head_count_ > 0; }
  int head_count() const { return head_count_; }
  ad::Var HeadLogits(ad::Tape& tape, ad::Var embedding) const;
  void DropHead();

  // Marks every "speaker/" parameter frozen or trainable.
  void SetFrozen(bool frozen) { params_.SetFrozen("speaker", frozen); }
  bool frozen() const { return params_.AllFrozen("speaker/"); }

 private:
  SpeakerConfig config_;
  ParamSet params_;
  nn::Linear in_fwd_, in_bwd_;
  Parameter* rec_fwd_ = nullptr;
  Parameter* rec_bwd_ = nullptr;
  AttentivePooling pool_;
  nn::Linear out_;
  nn::Linear head_;
  int head_count_ = 0;
};

}  // namespace speechchain

#endif  // SPEECHCHAIN_MODELS_SPEAKER_H_
