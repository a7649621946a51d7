// tests/unit/blocks_test.cc

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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "speechchain/errors.h"
#include "speechchain/nn/blocks.h"

namespace speechchain::nn {
namespace {

BlockConfig Small() { return BlockConfig{8, 2, 16, 2}; }

TEST(PositionalEncoding, FirstRowAlternates) {
  Matrix pe = PositionalEncoding(5, 6);
  for (int j = 0; j < 6; ++j) EXPECT_EQ(pe(0, j), j % 2 == 0 ? 0.0 : 1.0);
}

TEST(PositionalEncoding, BoundedAndMatchesDirectFormula) {
  Matrix pe = PositionalEncoding(3, 4);
  // Direct evaluation: frequencies 1 and 1/100 for dim 4.
  const double expected[3][4] = {
      {0.0, 1.0, 0.0, 1.0},
      {std::sin(1.0), std::cos(1.0), std::sin(0.01), std::cos(0.01)},
      {std::sin(2.0), std::cos(2.0), std::sin(0.02), std::cos(0.02)}};
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(pe(t, j), expected[t][j], 1e-15);
  Matrix big = PositionalEncoding(200, 64);
  for (int i = 0; i < big.size(); ++i) {
    EXPECT_LE(big[i], 1.0);
    EXPECT_GE(big[i], -1.0);
  }
}

TEST(PositionalEncoding, OddDimRejected) {
  EXPECT_THROW(PositionalEncoding(3, 5), ContractError);
}

TEST(BlockConfig, HeadsMustDivide) {
  EXPECT_THROW((BlockConfig{10, 3, 8, 1}.Validate()), ContractError);
  EXPECT_NO_THROW((BlockConfig{12, 3, 8, 1}.Validate()));
}

TEST(Attention, EqualScoresGiveUniformWeightsOverKeptKeys) {
  ParamSet ps;
  Rng rng(1);
  MultiHeadAttention mha(ps, "attn", Small(), rng);
  ps.Get("attn/q/w").value.SetZero();  // q = 0 so every score is 0
  Tape t;
  Var x = t.Constant(RandomNormal(4, 8, 1.0, rng));
  AttentionMask mask(4, 4);
  mask.set(0, 3, false);
  mask.set(2, 0, false);
  mask.set(2, 1, false);
  std::vector<Matrix> weights;
  mha.Forward(t, x, x, x, &mask, &weights);
  ASSERT_EQ(weights.size(), 2u);
  for (const Matrix& w : weights)
    for (int q = 0; q < 4; ++q) {
      int kept = 0;
      for (int k = 0; k < 4; ++k) kept += mask.keeps(q, k);
      for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(w(q, k), mask.keeps(q, k) ? 1.0 / kept : 0.0, 1e-15);
      }
    }
}

TEST(Attention, WeightsAreDistributions) {
  ParamSet ps;
  Rng rng(2);
  MultiHeadAttention mha(ps, "attn", Small(), rng);
  for (int trial = 0; trial < 20; ++trial) {
    Tape t;
    Var q = t.Constant(RandomNormal(5, 8, 2.0, rng));
    Var kv = t.Constant(RandomNormal(7, 8, 2.0, rng));
    AttentionMask mask(5, 7);
    for (int i = 0; i < 5; ++i) mask.set(i, (i + trial) % 7, false);
    std::vector<Matrix> weights;
    mha.Forward(t, q, kv, kv, &mask, &weights);
    for (const Matrix& w : weights)
      for (int i = 0; i < 5; ++i) {
        double s = 0.0;
        for (int k = 0; k < 7; ++k) {
          EXPECT_GE(w(i, k), 0.0);
          if (!mask.keeps(i, k)) {
            EXPECT_EQ(w(i, k), 0.0);
          }
          s += w(i, k);
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
  }
}

TEST(Attention, SingleKeptKeyReturnsItsProjectedValue) {
  ParamSet ps;
  Rng rng(3);
  MultiHeadAttention mha(ps, "attn", Small(), rng);
  Tape t;
  Matrix kv = RandomNormal(4, 8, 1.0, rng);
  Var q = t.Constant(RandomNormal(2, 8, 1.0, rng));
  Var kvv = t.Constant(kv);
  AttentionMask mask(2, 4, false);
  mask.set(0, 2, true);
  mask.set(1, 2, true);
  Var out = mha.Forward(t, q, kvv, kvv, &mask);
  Matrix row(1, 8);
  for (int j = 0; j < 8; ++j) row(0, j) = kv(2, j);
  Var expected =
      mha.output_proj().Forward(t, mha.value_proj().Forward(t, t.Constant(row)));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(out.value()(i, j), expected.value()(0, j), 1e-12);
}

TEST(Attention, MaskShapeMismatchRejected) {
  ParamSet ps;
  Rng rng(4);
  MultiHeadAttention mha(ps, "attn", Small(), rng);
  Tape t;
  Var x = t.Constant(RandomNormal(3, 8, 1.0, rng));
  AttentionMask mask(3, 4);
  EXPECT_THROW(mha.Forward(t, x, x, x, &mask), ContractError);
}

TEST(Attention, CausalOutputIgnoresFuturePositions) {
  ParamSet ps;
  Rng rng(5);
  MultiHeadAttention mha(ps, "attn", Small(), rng);
  const AttentionMask causal = AttentionMask::Causal(6);
  Matrix x = RandomNormal(6, 8, 1.0, rng);
  auto run = [&](const Matrix& in) {
    Tape t;
    Var v = t.Constant(in);
    return mha.Forward(t, v, v, v, &causal).value();
  };
  const Matrix base = run(x);
  for (int perturbed = 1; perturbed < 6; ++perturbed) {
    Matrix y = x;
    for (int j = 0; j < 8; ++j) y(perturbed, j) += 0.5;
    const Matrix out = run(y);
    for (int t = 0; t < perturbed; ++t)
      for (int j = 0; j < 8; ++j) EXPECT_EQ(out(t, j), base(t, j));
    double change = 0;
    for (int j = 0; j < 8; ++j) change += std::abs(out(perturbed, j) - base(perturbed, j));
    EXPECT_GT(change, 0.0);
  }
}

TEST(EncoderLayer, ZeroedSublayersPreserveInput) {
  ParamSet ps;
  Rng rng(6);
  EncoderLayer layer(ps, "enc", Small(), rng);
  layer.attention().output_proj().weight().value.SetZero();
  layer.feed_forward().outer().weight().value.SetZero();
  Tape t;
  Matrix x = RandomNormal(5, 8, 1.0, rng);
  EXPECT_EQ(layer.Forward(t, t.Constant(x), nullptr).value(), x);
}

TEST(Transformer, ShapesPreserved) {
  ParamSet ps;
  Rng rng(7);
  TransformerEncoder enc(ps, "enc", Small(), rng);
  TransformerDecoder dec(ps, "dec", Small(), rng);
  Tape t;
  Var x = t.Constant(RandomNormal(9, 8, 1.0, rng));
  Var h = enc.Forward(t, x);
  EXPECT_EQ(h.rows(), 9);
  EXPECT_EQ(h.cols(), 8);
  const AttentionMask causal = AttentionMask::Causal(4);
  Var y = dec.Forward(t, t.Constant(RandomNormal(4, 8, 1.0, rng)), h, &causal);
  EXPECT_EQ(y.rows(), 4);
  EXPECT_EQ(y.cols(), 8);
}

TEST(Transformer, DecoderDependsOnMemory) {
  ParamSet ps;
  Rng rng(8);
  TransformerDecoder dec(ps, "dec", Small(), rng);
  const AttentionMask causal = AttentionMask::Causal(3);
  Matrix x = RandomNormal(3, 8, 1.0, rng);
  Matrix mem = RandomNormal(5, 8, 1.0, rng);
  auto run = [&](const Matrix& m) {
    Tape t;
    return dec.Forward(t, t.Constant(x), t.Constant(m), &causal).value();
  };
  const Matrix base = run(mem);
  mem(2, 3) += 0.25;
  const Matrix moved = run(mem);
  for (int l = 0; l < 3; ++l) {
    double change = 0;
    for (int j = 0; j < 8; ++j) change += std::abs(moved(l, j) - base(l, j));
    EXPECT_GT(change, 1e-8) << "step " << l;
  }
}

// Finite-difference probe of d out_t / d in_t' through a whole causal stack.
TEST(Transformer, CausalStackHasZeroFutureJacobian) {
  ParamSet ps;
  Rng rng(9);
  TransformerDecoder dec(ps, "dec", Small(), rng);
  const AttentionMask causal = AttentionMask::Causal(5);
  Matrix x = RandomNormal(5, 8, 1.0, rng);
  Matrix mem = RandomNormal(4, 8, 1.0, rng);
  const double eps = 1e-6;
  for (int src = 0; src < 5; ++src)
    for (int j = 0; j < 8; j += 3) {
      Matrix up = x, down = x;
      up(src, j) += eps;
      down(src, j) -= eps;
      Tape t1, t2;
      const Matrix a = dec.Forward(t1, t1.Constant(up), t1.Constant(mem), &causal).value();
      const Matrix b = dec.Forward(t2, t2.Constant(down), t2.Constant(mem), &causal).value();
      for (int out = 0; out < src; ++out)
        for (int c = 0; c < 8; ++c) EXPECT_EQ((a(out, c) - b(out, c)) / (2 * eps), 0.0);
    }
}

TEST(LengthRegulator, Examples) {
  Tape t;
  Var states = t.Constant(Matrix::FromRows({{1, 10}, {2, 20}}));
  const std::vector<int> d = {2, 3};
  EXPECT_EQ(LengthRegulator(t, states, d).value(),
            Matrix::FromRows({{1, 10}, {1, 10}, {2, 20}, {2, 20}, {2, 20}}));
  const std::vector<int> ones = {1, 1};
  EXPECT_EQ(LengthRegulator(t, states, ones).value(), states.value());
  EXPECT_THROW(LengthRegulator(t, states, std::vector<int>{}), ContractError);
  EXPECT_THROW(LengthRegulator(t, states, std::vector<int>{1, 0}), ContractError);
}

TEST(LengthRegulator, PreservesRowsAndCountOnRandomDraws) {
  Rng rng(10);
  std::uniform_int_distribution<int> len(1, 8), dur(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = len(rng);
    Matrix states = RandomNormal(n, 3, 1.0, rng);
    std::vector<int> d(n);
    int total = 0;
    for (int& v : d) total += (v = dur(rng));
    Tape t;
    const Matrix out = LengthRegulator(t, t.Constant(states), d).value();
    ASSERT_EQ(out.rows(), total);
    int row = 0;
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < d[i]; ++r, ++row)
        for (int c = 0; c < 3; ++c) ASSERT_EQ(out(row, c), states(i, c));
  }
}

TEST(ClampDurations, RoundsAndClamps) {
  const std::vector<double> raw = {-3.0, 0.2, 0.5, 1.49, 2.5, 4.7};
  EXPECT_EQ(ClampDurations(raw), (std::vector<int>{1, 1, 1, 1, 3, 5}));
}

TEST(Conv1d, KernelOneIsLinear) {
  ParamSet ps;
  Rng rng(11);
  Conv1d conv(ps, "conv", 3, 2, 1, rng);
  Tape t;
  Var x = t.Constant(RandomNormal(4, 3, 1.0, rng));
  Var y = conv.Forward(t, x);
  EXPECT_EQ(y.rows(), 4);
  EXPECT_EQ(y.cols(), 2);
  EXPECT_THROW(Conv1d(ps, "bad", 3, 2, 2, rng), ContractError);
}

}  // namespace
}  // namespace speechchain::nn
