// src/models/asr.cc

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

#include "speechchain/models/asr.h"

#include <algorithm>
#include <cmath>

#include "speechchain/errors.h"

namespace speechchain {

using ad::Tape;
using ad::Var;
using corpus::PhonemeSequence;

void AsrConfig::Validate() const {
  encoder.Validate();
  decoder.Validate();
  if (encoder.model_dim != decoder.model_dim)
    throw ContractError("ASR encoder and decoder model_dim differ");
  if (feature_dim <= 0 || subsample <= 0) throw ContractError("bad ASR input geometry");
  if (!(ctc_weight >= 0.0 && ctc_weight < 1.0)) throw ContractError("ctc_weight must lie in [0, 1)");
}

std::vector<int> DecoderInputs(const PhonemeSequence& text) {
  std::vector<int> in;
  in.reserve(text.size() + 1);
  in.push_back(corpus::kBos);
  in.insert(in.end(), text.begin(), text.end());
  return in;
}

std::vector<int> DecoderTargets(const PhonemeSequence& text) {
  std::vector<int> out(text.begin(), text.end());
  out.push_back(corpus::kEos);
  return out;
}

double ScheduledSamplingProb(int epoch, int ramp_epochs, double max_prob) {
  if (ramp_epochs <= 0) return max_prob;
  const double t = std::clamp(static_cast<double>(epoch) / ramp_epochs, 0.0, 1.0);
  return max_prob * t;
}

AsrModel::AsrModel(const AsrConfig& config, uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng(seed);
  const int d = config_.encoder.model_dim;
  input_proj_ = nn::Linear(params_, "asr/input", config_.feature_dim * config_.subsample, d, rng);
  encoder_ = nn::TransformerEncoder(params_, "asr/enc", config_.encoder, rng);
  embedding_ = &params_.Add("asr/embed", RandomNormal(corpus::kVocabSize, d, 1.0, rng));
  decoder_ = nn::TransformerDecoder(params_, "asr/dec", config_.decoder, rng);
  output_ = nn::Linear(params_, "asr/out", d, corpus::kVocabSize, rng, config_.head_init_std);
  ctc_ = nn::Linear(params_, "asr/ctc", d, corpus::kVocabSize, rng, config_.head_init_std);
}

Var AsrModel::Encode(Tape& tape, Var features) const {
  if (features.rows() < 1) throw ContractError("ASR input has no frames");
  if (features.cols() != config_.feature_dim)
    throw ShapeError("ASR expects " + std::to_string(config_.feature_dim) +
                     " feature columns, got " + features.value().ShapeString());
  const int k = config_.subsample;
  const int steps = (features.rows() + k - 1) / k;
  std::vector<Var> groups;
  std::vector<int> idx(steps);
  for (int j = 0; j < k; ++j) {
    for (int s = 0; s < steps; ++s) {
      const int t = s * k + j;
      idx[s] = t < features.rows() ? t : -1;
    }
    groups.push_back(ad::GatherRows(features, idx));
  }
  Var stacked = k == 1 ? groups[0] : ad::ConcatCols(groups);
  Var x = ad::Add(input_proj_.Forward(tape, stacked),
                  tape.Constant(nn::PositionalEncoding(steps, config_.encoder.model_dim)));
  return encoder_.Forward(tape, x);
}

Var AsrModel::DecoderLogits(Tape& tape, Var memory, std::span<const int> inputs) const {
  const int n = static_cast<int>(inputs.size());
  if (n < 1) throw ContractError("decoder needs at least one input token");
  Var x = ad::Add(ad::GatherRows(tape.Param(*embedding_), inputs),
                  tape.Constant(nn::PositionalEncoding(n, config_.decoder.model_dim)));
  const nn::AttentionMask mask = nn::AttentionMask::Causal(n);
  return output_.Forward(tape, decoder_.Forward(tape, x, memory, &mask));
}

Var AsrModel::CeLossFromMemory(Tape& tape, Var memory, const PhonemeSequence& text,
                               std::span<const int> inputs) const {
  const std::vector<int> targets = DecoderTargets(text);
  if (inputs.size() != targets.size()) throw ContractError("decoder input/target length mismatch");
  Var logp = ad::LogSoftmaxRows(DecoderLogits(tape, memory, inputs));
  return ad::Scale(ad::Mean(ad::Pick(logp, targets)), -1.0);
}

Var AsrModel::CeLoss(Tape& tape, Var features, const PhonemeSequence& text) const {
  Var memory = Encode(tape, features);
  return CeLossFromMemory(tape, memory, text, DecoderInputs(text));
}

Var AsrModel::ScheduledSamplingLoss(Tape& tape, Var features, const PhonemeSequence& text,
                                    double sampling_prob, Rng& rng) const {
  if (!(sampling_prob >= 0.0 && sampling_prob <= 1.0))
    throw ContractError("sampling probability outside [0, 1]");
  return ScheduledSamplingLossFromMemory(tape, Encode(tape, features), text, sampling_prob, rng);
}

Var AsrModel::ScheduledSamplingLossFromMemory(Tape& tape, Var memory, const PhonemeSequence& text,
                                              double sampling_prob, Rng& rng) const {
  if (!(sampling_prob >= 0.0 && sampling_prob <= 1.0))
    throw ContractError("sampling probability outside [0, 1]");
  std::vector<int> inputs = DecoderInputs(text);
  if (sampling_prob > 0.0) {
    Tape probe(false);
    const Matrix logits =
        DecoderLogits(probe, probe.Constant(memory.value()), inputs).value();
    std::bernoulli_distribution coin(sampling_prob);
    std::vector<int> mixed = inputs;
    for (size_t l = 1; l < inputs.size(); ++l) {
      if (!coin(rng)) continue;
      const auto row = logits.Row(static_cast<int>(l - 1));
      mixed[l] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    inputs = std::move(mixed);
  }
  return CeLossFromMemory(tape, memory, text, inputs);
}

Var AsrModel::CtcLossFromMemory(Tape& tape, Var memory, const PhonemeSequence& text) const {
  if (text.empty()) throw ContractError("CTC target is empty");
  if (memory.rows() < ad::CtcMinFrames(text)) return Var();
  Var logp = ad::LogSoftmaxRows(ctc_.Forward(tape, memory));
  return ad::Scale(ad::CtcLoss(logp, text, corpus::kPad), 1.0 / static_cast<double>(text.size()));
}

Var AsrModel::PretrainLoss(Tape& tape, Var features, const PhonemeSequence& text,
                           double sampling_prob, Rng& rng) const {
  Var memory = Encode(tape, features);
  Var ce = ScheduledSamplingLossFromMemory(tape, memory, text, sampling_prob, rng);
  const double w = config_.ctc_weight;
  if (w <= 0.0) return ce;
  Var ctc = CtcLossFromMemory(tape, memory, text);
  if (!ctc.valid()) return ce;
  return ad::Add(ad::Scale(ce, 1.0 - w), ad::Scale(ctc, w));
}

Matrix AsrModel::StepPosteriors(const Matrix& features, const PhonemeSequence& text) const {
  Tape tape(false);
  Var memory = Encode(tape, tape.Constant(features));
  return ad::SoftmaxRows(DecoderLogits(tape, memory, DecoderInputs(text))).value();
}

PhonemeSequence AsrModel::GreedyDecode(const Matrix& features, int max_len) const {
  if (max_len < 1) throw ContractError("max_len must be at least 1");
  Tape enc_tape(false);
  const Matrix memory_value = Encode(enc_tape, enc_tape.Constant(features)).value();
  std::vector<int> inputs = {corpus::kBos};
  PhonemeSequence out;
  while (static_cast<int>(out.size()) < max_len) {
    Tape tape(false);
    const Matrix logits = DecoderLogits(tape, tape.Constant(memory_value), inputs).value();
    const auto row = logits.Row(logits.rows() - 1);
    const int best = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best == corpus::kEos) break;
    out.push_back(best);
    inputs.push_back(best);
  }
  return out;
}

double AsrModel::Perplexity(const Matrix& features, const PhonemeSequence& text) const {
  Tape tape(false);
  return std::exp(CeLoss(tape, tape.Constant(features), text).value()[0]);
}

}  // namespace speechchain
