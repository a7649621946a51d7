// tests/unit/speaker_test.cc

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

#include <gtest/gtest.h>

#include "speechchain/ad/gradcheck.h"
#include "speechchain/corpus/synth.h"
#include "speechchain/errors.h"
#include "speechchain/models/speaker.h"

namespace speechchain {
namespace {

using ad::Tape;
using ad::Var;

Matrix RandomFeatures(int t, int f, uint64_t seed) {
  Rng rng(seed);
  return RandomNormal(t, f, 0.5, rng);
}

TEST(AttentivePooling, IdenticalRowsPoolToThatRow) {
  ParamSet ps;
  Rng rng(1);
  AttentivePooling pool(ps, "p", 6, 4, rng);
  Matrix row = RandomNormal(1, 6, 1.0, rng);
  Matrix states(5, 6);
  for (int t = 0; t < 5; ++t)
    for (int c = 0; c < 6; ++c) states(t, c) = row(0, c);
  Tape tape(false);
  Matrix w;
  Matrix pooled = pool.Forward(tape, tape.Constant(states), &w).value();
  EXPECT_LT(MaxAbsDiff(pooled, row), 1e-12);
  double s = 0.0;
  for (double v : w.values()) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(SpeakerEmbedder, PoolingWeightsAreADistribution) {
  SpeakerEmbedder emb(SpeakerConfig{}, 3);
  for (int t : {1, 2, 17, 60}) {
    Tape tape(false);
    Matrix w;
    Var e = emb.Embed(tape, tape.Constant(RandomFeatures(t, 16, t)), &w);
    EXPECT_EQ(e.cols(), 16);
    ASSERT_EQ(w.cols(), t);
    double s = 0.0;
    for (double v : w.values()) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(SpeakerEmbedder, FramePermutationChangesEmbedding) {
  SpeakerEmbedder emb(SpeakerConfig{}, 3);
  Matrix x = RandomFeatures(9, 16, 5);
  Matrix y = x;
  for (int c = 0; c < 16; ++c) std::swap(y(0, c), y(7, c));
  EXPECT_GT(MaxAbsDiff(emb.Embed(x), emb.Embed(y)), 1e-8);
}

TEST(SpeakerEmbedder, NonzeroFiniteForRandomInput) {
  SpeakerEmbedder emb(SpeakerConfig{}, 11);
  for (uint64_t s = 0; s < 20; ++s) {
    Matrix e = emb.Embed(RandomFeatures(5 + s, 16, s));
    double norm = 0.0;
    for (double v : e.values()) {
      EXPECT_TRUE(std::isfinite(v));
      norm += v * v;
    }
    EXPECT_GT(norm, 0.0);
  }
}

TEST(SpeakerEmbedder, WrongFeatureWidthRejected) {
  SpeakerEmbedder emb(SpeakerConfig{}, 1);
  EXPECT_THROW(emb.Embed(Matrix(4, 15)), ShapeError);
}

TEST(SpeakerEmbedder, HeadNeedsTwoSpeakersAndCanBeDropped) {
  SpeakerEmbedder emb(SpeakerConfig{}, 1);
  const long base = emb.params().Count();
  EXPECT_THROW(emb.AddHead(1, 2), ContractError);
  emb.AddHead(4, 2);
  EXPECT_GT(emb.params().Count(), base);
  Tape tape(false);
  EXPECT_EQ(emb.HeadLogits(tape, tape.Constant(Matrix(1, 16, 0.1))).cols(), 4);
  emb.DropHead();
  EXPECT_EQ(emb.params().Count(), base);
  EXPECT_FALSE(emb.has_head());
}

TEST(SpeakerEmbedder, FrozenEmbedderPassesGradientToInputOnly) {
  SpeakerEmbedder emb(SpeakerConfig{}, 4);
  emb.SetFrozen(true);
  EXPECT_TRUE(emb.frozen());
  Tape tape;
  Var x = tape.Leaf(RandomFeatures(6, 16, 9));
  Var loss = ad::Sum(emb.Embed(tape, x));
  tape.Backward(loss);
  tape.AccumulateParamGrads();
  double gx = 0.0;
  for (double v : tape.Grad(x).values()) gx += std::abs(v);
  EXPECT_GT(gx, 0.0);
  for (const Parameter* p : std::as_const(emb.params()).All())
    for (double v : p->grad.values()) EXPECT_EQ(v, 0.0) << p->name;
}

TEST(SpeakerEmbedder, GradientMatchesFiniteDifferences) {
  SpeakerConfig c;
  c.hidden_dim = 5;
  c.attention_dim = 4;
  c.embedding_dim = 3;
  c.feature_dim = 4;
  SpeakerEmbedder emb(c, 8);
  emb.AddHead(3, 9);
  Matrix x = RandomFeatures(6, 4, 2);
  auto loss = [&](Tape& t) {
    Var logp = ad::LogSoftmaxRows(emb.HeadLogits(t, emb.Embed(t, t.Constant(x))));
    std::vector<int> label = {1};
    return ad::Scale(ad::Sum(ad::Pick(logp, label)), -1.0);
  };
  auto params = emb.params().All();
  auto r = ad::FiniteDiffCheck(loss, params);
  EXPECT_TRUE(r.passed) << r.worst << " " << r.max_rel_error;
}

}  // namespace
}  // namespace speechchain
