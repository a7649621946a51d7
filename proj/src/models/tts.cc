// src/models/tts.cc

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

#include "speechchain/models/tts.h"

#include "speechchain/errors.h"

namespace speechchain {

using ad::Tape;
using ad::Var;

namespace {

Matrix Column(const std::vector<double>& v) {
  return Matrix(static_cast<int>(v.size()), 1, v);
}

Matrix Column(const std::vector<int>& v) {
  return Matrix(static_cast<int>(v.size()), 1, std::vector<double>(v.begin(), v.end()));
}

}  // namespace

void TtsConfig::Validate() const {
  encoder.Validate();
  decoder.Validate();
  if (encoder.model_dim != decoder.model_dim)
    throw ContractError("TTS encoder and decoder model_dim differ");
  if (feature_dim <= 0 || speaker_dim <= 0 || predictor_hidden <= 0 || postnet_channels <= 0)
    throw ContractError("TTS dimensions must be positive");
}

VariancePredictor::VariancePredictor(ParamSet& params, const std::string& name, int in,
                                     int hidden, Rng& rng)
    : hidden_(params, name + "/hidden", in, hidden, rng), out_(params, name + "/out", hidden, 1, rng) {}

Var VariancePredictor::Forward(Tape& tape, Var x) const {
  return out_.Forward(tape, ad::Relu(hidden_.Forward(tape, x)));
}

TtsModel::TtsModel(const TtsConfig& config, uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng(seed);
  const int d = config_.encoder.model_dim;
  embedding_ = &params_.Add("tts.enc/embed", RandomNormal(corpus::kVocabSize, d, 1.0, rng));
  encoder_ = nn::TransformerEncoder(params_, "tts.enc/enc", config_.encoder, rng);
  speaker_proj_ = nn::Linear(params_, "tts.enc/speaker", config_.speaker_dim, d, rng);
  pitch_ = VariancePredictor(params_, "tts.va/pitch", d, config_.predictor_hidden, rng);
  energy_ = VariancePredictor(params_, "tts.va/energy", d, config_.predictor_hidden, rng);
  duration_ = VariancePredictor(params_, "tts.va/duration", d, config_.predictor_hidden, rng);
  pitch_proj_ = nn::Linear(params_, "tts.va/pitch_proj", 1, d, rng);
  energy_proj_ = nn::Linear(params_, "tts.va/energy_proj", 1, d, rng);
  decoder_ = nn::TransformerEncoder(params_, "tts.dec/dec", config_.decoder, rng);
  output_ = nn::Linear(params_, "tts.dec/out", d, config_.feature_dim, rng);
  post1_ = nn::Conv1d(params_, "tts.post/conv1", config_.feature_dim, config_.postnet_channels,
                      config_.postnet_kernel, rng);
  post2_ = nn::Conv1d(params_, "tts.post/conv2", config_.postnet_channels, config_.feature_dim,
                      config_.postnet_kernel, rng);
}

SynthesisOutput TtsModel::Synthesize(Tape& tape, const corpus::PhonemeSequence& text,
                                     const Matrix& speaker_embedding, SynthesisMode mode,
                                     const corpus::ProsodyTrack* targets) const {
  if (text.empty()) throw ContractError("cannot synthesize an empty text");
  for (int t : text)
    if (!corpus::IsTextToken(t)) throw ContractError("token " + std::to_string(t) + " is not text");
  if (speaker_embedding.rows() != 1 || speaker_embedding.cols() != config_.speaker_dim)
    throw ShapeError("speaker embedding must be " + ShapeString(1, config_.speaker_dim) +
                     ", got " + speaker_embedding.ShapeString());
  const int n = static_cast<int>(text.size());
  if (mode == SynthesisMode::kTeacher) {
    if (targets == nullptr) throw ContractError("teacher mode needs prosody targets");
    if (targets->size() != n) throw ContractError("prosody targets do not match the text length");
  }
  const int d = config_.encoder.model_dim;

  Var x = ad::Add(ad::GatherRows(tape.Param(*embedding_), text),
                  tape.Constant(nn::PositionalEncoding(n, d)));
  Var states = encoder_.Forward(tape, x);
  states = ad::Add(states, speaker_proj_.Forward(tape, tape.Constant(speaker_embedding)));

  SynthesisOutput out;
  out.pitch = pitch_.Forward(tape, states);
  out.energy = energy_.Forward(tape, states);
  out.duration = duration_.Forward(tape, states);

  Var pitch_in, energy_in;
  if (mode == SynthesisMode::kTeacher) {
    pitch_in = tape.Constant(Column(targets->pitch));
    energy_in = tape.Constant(Column(targets->energy));
    out.frames_per_token = targets->duration;
  } else {
    pitch_in = out.pitch;
    energy_in = out.energy;
    out.frames_per_token = nn::ClampDurations(out.duration.value().values());
  }
  Var adapted = ad::Add(states, ad::Add(pitch_proj_.Forward(tape, pitch_in),
                                        energy_proj_.Forward(tape, energy_in)));
  Var frames = nn::LengthRegulator(tape, adapted, out.frames_per_token);
  frames = ad::Add(frames, tape.Constant(nn::PositionalEncoding(frames.rows(), d)));
  out.decoder_features = output_.Forward(tape, decoder_.Forward(tape, frames));
  Var residual = post2_.Forward(tape, ad::Tanh(post1_.Forward(tape, out.decoder_features)));
  out.features = ad::Add(out.decoder_features, residual);
  return out;
}

Matrix TtsModel::SynthesizeFree(const corpus::PhonemeSequence& text,
                                const Matrix& speaker_embedding) const {
  Tape tape(false);
  return Synthesize(tape, text, speaker_embedding, SynthesisMode::kFree).features.value();
}

TtsLossTerms TtsLoss(Tape& tape, const SynthesisOutput& out, const Matrix& features,
                     const corpus::ProsodyTrack& prosody) {
  if (!out.features.value().SameShape(features))
    throw ShapeError("synthesized " + out.features.value().ShapeString() + " vs target " +
                     features.ShapeString());
  if (out.pitch.rows() != prosody.size())
    throw ShapeError("prosody length " + std::to_string(prosody.size()) + " vs " +
                     std::to_string(out.pitch.rows()) + " predictions");
  Var x = tape.Constant(features);
  TtsLossTerms terms;
  Var l_feat = ad::L1Distance(x, out.features);
  Var l_dec = ad::L1Distance(x, out.decoder_features);
  Var l_pitch = ad::SquaredL2Distance(tape.Constant(Column(prosody.pitch)), out.pitch);
  Var l_energy = ad::SquaredL2Distance(tape.Constant(Column(prosody.energy)), out.energy);
  Var l_dur = ad::SquaredL2Distance(tape.Constant(Column(prosody.duration)), out.duration);
  terms.total = ad::Add(ad::Add(ad::Add(ad::Add(l_feat, l_dec), l_pitch), l_energy), l_dur);
  terms.features = l_feat.value()[0];
  terms.decoder_features = l_dec.value()[0];
  terms.pitch = l_pitch.value()[0];
  terms.energy = l_energy.value()[0];
  terms.duration = l_dur.value()[0];
  return terms;
}

}  // namespace speechchain
