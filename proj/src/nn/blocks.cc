// src/nn/blocks.cc

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

#include "speechchain/nn/blocks.h"

#include <cmath>

#include "speechchain/errors.h"

namespace speechchain::nn {

void BlockConfig::Validate() const {
  if (model_dim <= 0 || head_count <= 0 || ff_dim <= 0 || layer_count <= 0)
    throw ContractError("block config extents must be positive");
  if (model_dim % head_count != 0)
    throw ContractError("model_dim " + std::to_string(model_dim) +
                        " is not divisible by head_count " + std::to_string(head_count));
}

Linear::Linear(ParamSet& params, const std::string& name, int in, int out, Rng& rng,
               double init_std) {
  const double std = init_std >= 0.0 ? init_std : 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = &params.Add(name + "/w", RandomNormal(in, out, std, rng));
  bias_ = &params.Add(name + "/b", Matrix(1, out));
}

Var Linear::Forward(Tape& tape, Var x) const {
  return ad::Add(ad::MatMul(x, tape.Param(*weight_)), tape.Param(*bias_));
}

LayerNorm::LayerNorm(ParamSet& params, const std::string& name, int dim) {
  gain_ = &params.Add(name + "/gain", Matrix(1, dim, 1.0));
  bias_ = &params.Add(name + "/bias", Matrix(1, dim));
}

Var LayerNorm::Forward(Tape& tape, Var x) const {
  return ad::LayerNormRows(x, tape.Param(*gain_), tape.Param(*bias_));
}

AttentionMask::AttentionMask(int queries, int keys, bool keep_all)
    : queries_(queries), keys_(keys), keep_(static_cast<size_t>(queries) * keys, keep_all) {
  if (queries <= 0 || keys <= 0) throw ContractError("attention mask extents must be positive");
}

AttentionMask AttentionMask::Causal(int length) {
  AttentionMask m(length, length, false);
  for (int q = 0; q < length; ++q)
    for (int k = 0; k <= q; ++k) m.set(q, k, true);
  return m;
}

Matrix AttentionMask::Additive() const {
  Matrix m(queries_, keys_);
  for (int q = 0; q < queries_; ++q) {
    bool any = false;
    for (int k = 0; k < keys_; ++k) {
      if (keeps(q, k))
        any = true;
      else
        m(q, k) = -1e30;
    }
    if (!any) throw ContractError("attention mask blocks every key of query " + std::to_string(q));
  }
  return m;
}

MultiHeadAttention::MultiHeadAttention(ParamSet& params, const std::string& name,
                                       const BlockConfig& config, Rng& rng)
    : model_dim_(config.model_dim), heads_(config.head_count) {
  config.Validate();
  wq_ = Linear(params, name + "/q", model_dim_, model_dim_, rng);
  wk_ = Linear(params, name + "/k", model_dim_, model_dim_, rng);
  wv_ = Linear(params, name + "/v", model_dim_, model_dim_, rng);
  wo_ = Linear(params, name + "/o", model_dim_, model_dim_, rng);
}

Var MultiHeadAttention::Forward(Tape& tape, Var queries, Var keys, Var values,
                                const AttentionMask* mask, std::vector<Matrix>* weights) const {
  for (Var v : {queries, keys, values})
    if (v.cols() != model_dim_)
      throw ShapeError("attention input " + v.value().ShapeString() + " vs model_dim " +
                       std::to_string(model_dim_));
  if (keys.rows() != values.rows())
    throw ShapeError("attention keys " + keys.value().ShapeString() + " vs values " +
                     values.value().ShapeString());
  Var mask_add;
  if (mask) {
    if (mask->queries() != queries.rows() || mask->keys() != keys.rows())
      throw ContractError("attention mask " + ShapeString(mask->queries(), mask->keys()) +
                          " does not match queries x keys " +
                          ShapeString(queries.rows(), keys.rows()));
    mask_add = tape.Constant(mask->Additive());
  }
  Var q = wq_.Forward(tape, queries);
  Var k = wk_.Forward(tape, keys);
  Var v = wv_.Forward(tape, values);
  const int head_dim = model_dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> heads;
  if (weights) weights->clear();
  for (int h = 0; h < heads_; ++h) {
    Var qh = heads_ == 1 ? q : ad::SliceCols(q, h * head_dim, head_dim);
    Var kh = heads_ == 1 ? k : ad::SliceCols(k, h * head_dim, head_dim);
    Var vh = heads_ == 1 ? v : ad::SliceCols(v, h * head_dim, head_dim);
    Var scores = ad::Scale(ad::MatMulNT(qh, kh), scale);
    if (mask) scores = ad::Add(scores, mask_add);
    Var attn = ad::SoftmaxRows(scores);
    if (weights) weights->push_back(attn.value());
    heads.push_back(ad::MatMul(attn, vh));
  }
  Var joined = heads_ == 1 ? heads[0] : ad::ConcatCols(heads);
  return wo_.Forward(tape, joined);
}

FeedForward::FeedForward(ParamSet& params, const std::string& name, int model_dim, int ff_dim,
                         Rng& rng)
    : inner_(params, name + "/inner", model_dim, ff_dim, rng),
      outer_(params, name + "/outer", ff_dim, model_dim, rng) {}

Var FeedForward::Forward(Tape& tape, Var x) const {
  return outer_.Forward(tape, ad::Relu(inner_.Forward(tape, x)));
}

EncoderLayer::EncoderLayer(ParamSet& params, const std::string& name, const BlockConfig& config,
                           Rng& rng)
    : norm_attn_(params, name + "/norm_attn", config.model_dim),
      norm_ff_(params, name + "/norm_ff", config.model_dim),
      attn_(params, name + "/attn", config, rng),
      ff_(params, name + "/ff", config.model_dim, config.ff_dim, rng) {}

Var EncoderLayer::Forward(Tape& tape, Var x, const AttentionMask* mask) const {
  Var n = norm_attn_.Forward(tape, x);
  x = ad::Add(x, attn_.Forward(tape, n, n, n, mask));
  return ad::Add(x, ff_.Forward(tape, norm_ff_.Forward(tape, x)));
}

DecoderLayer::DecoderLayer(ParamSet& params, const std::string& name, const BlockConfig& config,
                           Rng& rng)
    : norm_self_(params, name + "/norm_self", config.model_dim),
      norm_cross_(params, name + "/norm_cross", config.model_dim),
      norm_ff_(params, name + "/norm_ff", config.model_dim),
      self_attn_(params, name + "/self_attn", config, rng),
      cross_attn_(params, name + "/cross_attn", config, rng),
      ff_(params, name + "/ff", config.model_dim, config.ff_dim, rng) {}

Var DecoderLayer::Forward(Tape& tape, Var x, Var memory, const AttentionMask* self_mask) const {
  Var n = norm_self_.Forward(tape, x);
  x = ad::Add(x, self_attn_.Forward(tape, n, n, n, self_mask));
  Var c = norm_cross_.Forward(tape, x);
  x = ad::Add(x, cross_attn_.Forward(tape, c, memory, memory, nullptr));
  return ad::Add(x, ff_.Forward(tape, norm_ff_.Forward(tape, x)));
}

TransformerEncoder::TransformerEncoder(ParamSet& params, const std::string& name,
                                       const BlockConfig& config, Rng& rng) {
  config.Validate();
  for (int i = 0; i < config.layer_count; ++i)
    layers_.emplace_back(params, name + "/layer" + std::to_string(i), config, rng);
  final_norm_ = LayerNorm(params, name + "/final_norm", config.model_dim);
}

Var TransformerEncoder::Forward(Tape& tape, Var x, const AttentionMask* mask) const {
  for (const EncoderLayer& layer : layers_) x = layer.Forward(tape, x, mask);
  return final_norm_.Forward(tape, x);
}

TransformerDecoder::TransformerDecoder(ParamSet& params, const std::string& name,
                                       const BlockConfig& config, Rng& rng) {
  config.Validate();
  for (int i = 0; i < config.layer_count; ++i)
    layers_.emplace_back(params, name + "/layer" + std::to_string(i), config, rng);
  final_norm_ = LayerNorm(params, name + "/final_norm", config.model_dim);
}

Var TransformerDecoder::Forward(Tape& tape, Var x, Var memory,
                                const AttentionMask* self_mask) const {
  for (const DecoderLayer& layer : layers_) x = layer.Forward(tape, x, memory, self_mask);
  return final_norm_.Forward(tape, x);
}

Conv1d::Conv1d(ParamSet& params, const std::string& name, int in, int out, int kernel, Rng& rng)
    : kernel_(kernel) {
  if (kernel <= 0 || kernel % 2 == 0) throw ContractError("Conv1d kernel must be odd");
  proj_ = Linear(params, name, in * kernel, out, rng);
}

Var Conv1d::Forward(Tape& tape, Var x) const {
  const int steps = x.rows();
  const int half = kernel_ / 2;
  std::vector<Var> taps;
  std::vector<int> idx(steps);
  for (int offset = -half; offset <= half; ++offset) {
    if (offset == 0) {
      taps.push_back(x);
      continue;
    }
    for (int t = 0; t < steps; ++t) {
      const int src = t + offset;
      idx[t] = (src >= 0 && src < steps) ? src : -1;
    }
    taps.push_back(ad::GatherRows(x, idx));
  }
  return proj_.Forward(tape, kernel_ == 1 ? x : ad::ConcatCols(taps));
}

Matrix PositionalEncoding(int length, int dim) {
  if (length < 1 || dim < 1) throw ContractError("positional encoding extents must be positive");
  if (dim % 2 != 0) throw ContractError("positional encoding dim must be even, got " +
                                        std::to_string(dim));
  Matrix pe(length, dim);
  for (int t = 0; t < length; ++t)
    for (int i = 0; i < dim / 2; ++i) {
      const double angle = t / std::pow(10000.0, 2.0 * i / dim);
      pe(t, 2 * i) = std::sin(angle);
      pe(t, 2 * i + 1) = std::cos(angle);
    }
  return pe;
}

Var LengthRegulator(Tape& tape, Var states, std::span<const int> durations) {
  (void)tape;
  if (durations.empty()) throw ContractError("length regulator: empty input");
  if (static_cast<int>(durations.size()) != states.rows())
    throw ShapeError("length regulator: " + std::to_string(durations.size()) +
                     " durations for states " + states.value().ShapeString());
  std::vector<int> idx;
  for (size_t i = 0; i < durations.size(); ++i) {
    if (durations[i] < 1)
      throw ContractError("length regulator: duration " + std::to_string(durations[i]) +
                          " at phoneme " + std::to_string(i));
    idx.insert(idx.end(), durations[i], static_cast<int>(i));
  }
  return ad::GatherRows(states, idx);
}

std::vector<int> ClampDurations(std::span<const double> predicted) {
  std::vector<int> out;
  out.reserve(predicted.size());
  for (double d : predicted) {
    const double r = std::round(d);
    out.push_back(r < 1.0 || !std::isfinite(r) ? 1 : static_cast<int>(r));
  }
  return out;
}

}  // namespace speechchain::nn
