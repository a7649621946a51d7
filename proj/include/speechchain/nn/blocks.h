// include/speechchain/nn/blocks.h

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

#ifndef SPEECHCHAIN_NN_BLOCKS_H_
#define SPEECHCHAIN_NN_BLOCKS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "speechchain/ad/ops.h"
#include "speechchain/ad/param.h"

namespace speechchain::nn {

using ad::Tape;
using ad::Var;

struct BlockConfig {
  int model_dim = 64;
  int head_count = 2;
  int ff_dim = 128;
  int layer_count = 2;

  // Throws ContractError unless all extents are positive and head_count
  // divides model_dim.
  void Validate() const;
};

// y = x W + b. Weights start N(0, 1/in) unless init_std is given.
class Linear {
 public:
  Linear() = default;
  Linear(ParamSet& params, const std::string& name, int in, int out, Rng& rng,
         double init_std = -1.0);
  Var Forward(Tape& tape, Var x) const;
  Parameter& weight() const { return *weight_; }
  Parameter& bias() const { return *bias_; }

 private:
  Parameter* weight_ = nullptr;
  Parameter* bias_ = nullptr;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParamSet& params, const std::string& name, int dim);
  Var Forward(Tape& tape, Var x) const;

 private:
  Parameter* gain_ = nullptr;
  Parameter* bias_ = nullptr;
};

// Keep/block flag per (query, key) pair.
class AttentionMask {
 public:
  AttentionMask(int queries, int keys, bool keep_all = true);
  static AttentionMask Causal(int length);

  int queries() const { return queries_; }
  int keys() const { return keys_; }
  bool keeps(int q, int k) const { return keep_[static_cast<size_t>(q) * keys_ + k] != 0; }
  void set(int q, int k, bool keep) { keep_[static_cast<size_t>(q) * keys_ + k] = keep; }
  // 0 for kept pairs, a large negative number for blocked ones.
  Matrix Additive() const;

 private:
  int queries_;
  int keys_;
  std::vector<uint8_t> keep_;
};

// Scaled dot-product attention in head_count heads over model_dim / head_count
// columns each; heads are concatenated and projected. Blocked pairs get an
// attention weight of exactly zero. Every query row must keep at least one
// key.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamSet& params, const std::string& name, const BlockConfig& config,
                     Rng& rng);

  // When `weights` is given it receives one queries x keys matrix per head.
  Var Forward(Tape& tape, Var queries, Var keys, Var values, const AttentionMask* mask,
              std::vector<Matrix>* weights = nullptr) const;

  const Linear& query_proj() const { return wq_; }
  const Linear& key_proj() const { return wk_; }
  const Linear& value_proj() const { return wv_; }
  const Linear& output_proj() const { return wo_; }

 private:
  int model_dim_ = 0;
  int heads_ = 0;
  Linear wq_, wk_, wv_, wo_;
};

class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParamSet& params, const std::string& name, int model_dim, int ff_dim, Rng& rng);
  Var Forward(Tape& tape, Var x) const;
  const Linear& inner() const { return inner_; }
  const Linear& outer() const { return outer_; }

 private:
  Linear inner_, outer_;
};

// Pre-norm residual layer: x + SelfAttn(LN(x)), then x + FF(LN(x)).
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(ParamSet& params, const std::string& name, const BlockConfig& config, Rng& rng);
  Var Forward(Tape& tape, Var x, const AttentionMask* mask) const;
  const MultiHeadAttention& attention() const { return attn_; }
  const FeedForward& feed_forward() const { return ff_; }

 private:
  LayerNorm norm_attn_, norm_ff_;
  MultiHeadAttention attn_;
  FeedForward ff_;
};

// Pre-norm decoder layer: masked self-attention, attention over `memory`,
// feed-forward, each wrapped in a residual connection.
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(ParamSet& params, const std::string& name, const BlockConfig& config, Rng& rng);
  Var Forward(Tape& tape, Var x, Var memory, const AttentionMask* self_mask) const;

 private:
  LayerNorm norm_self_, norm_cross_, norm_ff_;
  MultiHeadAttention self_attn_, cross_attn_;
  FeedForward ff_;
};

// layer_count EncoderLayers followed by a final LayerNorm.
class TransformerEncoder {
 public:
  TransformerEncoder() = default;
  TransformerEncoder(ParamSet& params, const std::string& name, const BlockConfig& config,
                     Rng& rng);
  Var Forward(Tape& tape, Var x, const AttentionMask* mask = nullptr) const;
  const std::vector<EncoderLayer>& layers() const { return layers_; }

 private:
  std::vector<EncoderLayer> layers_;
  LayerNorm final_norm_;
};

class TransformerDecoder {
 public:
  TransformerDecoder() = default;
  TransformerDecoder(ParamSet& params, const std::string& name, const BlockConfig& config,
                     Rng& rng);
  Var Forward(Tape& tape, Var x, Var memory, const AttentionMask* self_mask) const;

 private:
  std::vector<DecoderLayer> layers_;
  LayerNorm final_norm_;
};

// Same-length 1-D convolution over rows (time), zero padded at both ends.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParamSet& params, const std::string& name, int in, int out, int kernel, Rng& rng);
  Var Forward(Tape& tape, Var x) const;

 private:
  int kernel_ = 1;
  Linear proj_;
};

// Sinusoid table: pe(t, 2i) = sin(t / 10000^(2i/dim)), pe(t, 2i+1) = cos(...).
// dim must be even.
Matrix PositionalEncoding(int length, int dim);

// Row i of `states` repeated durations[i] times, in order. Every duration
// must be at least 1.
Var LengthRegulator(Tape& tape, Var states, std::span<const int> durations);

// Rounds each predicted duration to the nearest integer and clamps at 1.
std::vector<int> ClampDurations(std::span<const double> predicted);

}  // namespace speechchain::nn

#endif  // SPEECHCHAIN_NN_BLOCKS_H_
