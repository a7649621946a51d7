// src/models/speaker.cc

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

#include "speechchain/models/speaker.h"

#include <cmath>

#include "speechchain/errors.h"

namespace speechchain {

using ad::Tape;
using ad::Var;

void SpeakerConfig::Validate() const {
  if (feature_dim <= 0 || hidden_dim <= 0 || attention_dim <= 0 || embedding_dim <= 0)
    throw ContractError("speaker model dimensions must be positive");
}

AttentivePooling::AttentivePooling(ParamSet& params, const std::string& name, int in,
                                   int attention_dim, Rng& rng)
    : score_hidden_(params, name + "/hidden", in, attention_dim, rng) {
  score_vector_ = &params.Add(name + "/v",
                              RandomNormal(attention_dim, 1, 1.0 / std::sqrt(attention_dim), rng));
}

Var AttentivePooling::Forward(Tape& tape, Var states, Matrix* weights) const {
  if (states.rows() < 1) throw ContractError("attention pooling needs at least one frame");
  Var scores = ad::MatMul(ad::Tanh(score_hidden_.Forward(tape, states)),
                          tape.Param(*score_vector_));           // T x 1
  Var w = ad::SoftmaxRows(ad::Transpose(scores));                 // 1 x T
  if (weights != nullptr) *weights = w.value();
  return ad::MatMul(w, states);
}

SpeakerEmbedder::SpeakerEmbedder(const SpeakerConfig& config, uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng(seed);
  const int h = config_.hidden_dim;
  in_fwd_ = nn::Linear(params_, "speaker/in_fwd", config_.feature_dim, h, rng);
  in_bwd_ = nn::Linear(params_, "speaker/in_bwd", config_.feature_dim, h, rng);
  rec_fwd_ = &params_.Add("speaker/rec_fwd", RandomNormal(h, h, 0.5 / std::sqrt(h), rng));
  rec_bwd_ = &params_.Add("speaker/rec_bwd", RandomNormal(h, h, 0.5 / std::sqrt(h), rng));
  pool_ = AttentivePooling(params_, "speaker/pool", 2 * h, config_.attention_dim, rng);
  out_ = nn::Linear(params_, "speaker/out", 2 * h, config_.embedding_dim, rng);
}

Var SpeakerEmbedder::Embed(Tape& tape, Var features, Matrix* pooling_weights) const {
  if (features.rows() < 1) throw ContractError("speaker embedding of an empty utterance");
  if (features.cols() != config_.feature_dim)
    throw ShapeError("speaker embedder expects " + std::to_string(config_.feature_dim) +
                     " feature columns, got " + features.value().ShapeString());
  Var fwd = ad::ElmanScan(in_fwd_.Forward(tape, features), tape.Param(*rec_fwd_), false);
  Var bwd = ad::ElmanScan(in_bwd_.Forward(tape, features), tape.Param(*rec_bwd_), true);
  Var pooled = pool_.Forward(tape, ad::ConcatCols({fwd, bwd}), pooling_weights);
  return out_.Forward(tape, pooled);
}

Matrix SpeakerEmbedder::Embed(const Matrix& features) const {
  Tape tape(false);
  return Embed(tape, tape.Constant(features)).value();
}

void SpeakerEmbedder::AddHead(int speaker_count, uint64_t seed) {
  if (speaker_count < 2) throw ContractError("speaker classification needs at least 2 speakers");
  DropHead();
  Rng rng(seed);
  head_ = nn::Linear(params_, "speaker.head/out", config_.embedding_dim, speaker_count, rng);
  head_count_ = speaker_count;
}

Var SpeakerEmbedder::HeadLogits(Tape& tape, Var embedding) const {
  if (!has_head()) throw ContractError("speaker classification head is not present");
  return head_.Forward(tape, ad::Tanh(embedding));
}

void SpeakerEmbedder::DropHead() {
  params_.Remove("speaker.head/");
  head_ = nn::Linear();
  head_count_ = 0;
}

}  // namespace speechchain
