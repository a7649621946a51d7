// tests/unit/asr_test.cc

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
#include "speechchain/errors.h"
#include "speechchain/models/asr.h"

namespace speechchain {
namespace {

using ad::Tape;
using ad::Var;
using corpus::PhonemeSequence;

AsrConfig Mini() {
  AsrConfig c;
  c.encoder = {8, 2, 12, 1};
  c.decoder = {8, 2, 12, 1};
  c.head_init_std = 0.5;
  return c;
}

Matrix Features(int t, uint64_t seed) {
  Rng rng(seed);
  return RandomNormal(t, corpus::kFeatureDim, 1.0, rng);
}

TEST(Asr, EncoderRowsAreCeilOfHalf) {
  AsrModel asr(AsrConfig{}, 1);
  for (int t = 1; t <= 9; ++t) {
    Tape tape(false);
    EXPECT_EQ(asr.Encode(tape, tape.Constant(Features(t, t))).rows(), (t + 1) / 2);
  }
}

TEST(Asr, EncodeIsDeterministicAndHasNoDeadFrames) {
  AsrModel asr(AsrConfig{}, 2);
  const Matrix x = Features(7, 3);
  Tape a(false), b(false);
  const Matrix h = asr.Encode(a, a.Constant(x)).value();
  EXPECT_EQ(h, asr.Encode(b, b.Constant(x)).value());
  for (int t = 0; t < 7; ++t) {
    Matrix y = x;
    y(t, 5) += 0.1;
    Tape c(false);
    EXPECT_GT(MaxAbsDiff(asr.Encode(c, c.Constant(y)).value(), h), 1e-9) << "frame " << t;
  }
}

TEST(Asr, PosteriorsSumToOneAndStartNearUniform) {
  AsrModel asr(AsrConfig{}, 4);
  const PhonemeSequence text = {5, 9, corpus::kSpace, 7};
  const Matrix p = asr.StepPosteriors(Features(10, 1), text);
  ASSERT_EQ(p.rows(), 5);
  ASSERT_EQ(p.cols(), corpus::kVocabSize);
  for (int l = 0; l < p.rows(); ++l) {
    double s = 0.0;
    for (int v = 0; v < p.cols(); ++v) {
      s += p(l, v);
      EXPECT_NEAR(p(l, v), 1.0 / 32, 0.1 / 32);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Asr, PosteriorIgnoresFutureTokens) {
  AsrModel asr(Mini(), 5);
  const Matrix x = Features(8, 2);
  const Matrix a = asr.StepPosteriors(x, {4, 5, 6, 7});
  const Matrix b = asr.StepPosteriors(x, {4, 5, 20, 21});
  // Rows 0..2 depend only on BOS, 4, 5.
  for (int l = 0; l < 3; ++l)
    for (int v = 0; v < corpus::kVocabSize; ++v) EXPECT_EQ(a(l, v), b(l, v));
  EXPECT_GT(std::abs(a(3, 0) - b(3, 0)) + std::abs(a(4, 0) - b(4, 0)), 0.0);
}

TEST(Asr, UniformPosteriorGivesLnVocab) {
  AsrModel asr(Mini(), 6);
  asr.params().Get("asr/out/w").value.SetZero();
  Tape tape(false);
  Var ce = asr.CeLoss(tape, tape.Constant(Features(5, 1)), {4, 8});
  EXPECT_NEAR(ce.value()[0], std::log(32.0), 1e-10);
  EXPECT_NEAR(asr.Perplexity(Features(5, 1), {4, 8}), 32.0, 1e-10);
}

TEST(Asr, CeMatchesRecomputationAndFactorization) {
  AsrModel asr(Mini(), 7);
  const PhonemeSequence text = {10, 4, corpus::kSpace, 30, 12};
  const Matrix x = Features(11, 8);
  const Matrix p = asr.StepPosteriors(x, text);
  const std::vector<int> targets = DecoderTargets(text);
  double log_prob = 0.0;
  for (size_t l = 0; l < targets.size(); ++l) log_prob += std::log(p(l, targets[l]));
  Tape tape(false);
  const double ce = asr.CeLoss(tape, tape.Constant(x), text).value()[0];
  EXPECT_NEAR(ce, -log_prob / targets.size(), 1e-10);
  EXPECT_NEAR(-ce * targets.size(), log_prob, 1e-10);
}

TEST(Asr, PerplexityIsExpOfCe) {
  AsrModel asr(Mini(), 9);
  for (uint64_t s = 0; s < 10; ++s) {
    const Matrix x = Features(3 + s, s);
    const PhonemeSequence text = {static_cast<int>(4 + s), 5};
    Tape tape(false);
    const double ce = asr.CeLoss(tape, tape.Constant(x), text).value()[0];
    EXPECT_NEAR(asr.Perplexity(x, text), std::exp(ce), 1e-10);
  }
}

TEST(Asr, ScheduledSamplingAtZeroIsTeacherForcing) {
  AsrModel asr(Mini(), 10);
  const Matrix x = Features(9, 4);
  const PhonemeSequence text = {6, 7, 8};
  Rng rng(1);
  Tape a(false), b(false);
  EXPECT_EQ(asr.ScheduledSamplingLoss(a, a.Constant(x), text, 0.0, rng).value()[0],
            asr.CeLoss(b, b.Constant(x), text).value()[0]);
  Tape c(false);
  EXPECT_THROW(asr.ScheduledSamplingLoss(c, c.Constant(x), text, 1.5, rng), ContractError);
}

TEST(Asr, SamplingSchedule) {
  EXPECT_DOUBLE_EQ(ScheduledSamplingProb(10, 20, 0.4), 0.2);
  EXPECT_DOUBLE_EQ(ScheduledSamplingProb(0, 20, 0.4), 0.0);
  EXPECT_DOUBLE_EQ(ScheduledSamplingProb(20, 20, 0.4), 0.4);
  EXPECT_DOUBLE_EQ(ScheduledSamplingProb(35, 20, 0.4), 0.4);
}

TEST(Asr, GreedyDecodeTerminatesAndIsDeterministic) {
  AsrModel asr(Mini(), 11);
  const Matrix x = Features(12, 5);
  for (int max_len : {1, 3, 8}) {
    const PhonemeSequence a = asr.GreedyDecode(x, max_len);
    EXPECT_LE(static_cast<int>(a.size()), max_len);
    EXPECT_EQ(a, asr.GreedyDecode(x, max_len));
  }
  EXPECT_THROW(asr.GreedyDecode(x, 0), ContractError);
}

TEST(Asr, CeGradientMatchesFiniteDifferences) {
  AsrModel asr(Mini(), 12);
  const Matrix x = Features(6, 3);
  auto loss = [&](Tape& t) { return asr.CeLoss(t, t.Constant(x), {9, 17}); };
  auto params = asr.params().All();
  ad::GradCheckOptions opt;
  opt.max_coords_per_input = 6;
  auto r = ad::FiniteDiffCheck(loss, params, opt);
  EXPECT_TRUE(r.passed) << r.worst << " " << r.max_rel_error;
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(Asr, WrongWidthAndEmptyTextRejected) {
  AsrModel asr(Mini(), 1);
  Tape tape(false);
  EXPECT_THROW(asr.Encode(tape, tape.Constant(Matrix(4, 3))), ShapeError);
  EXPECT_THROW(asr.DecoderLogits(tape, tape.Constant(Matrix(2, 8)), std::vector<int>{}),
               ContractError);
}

TEST(Asr, PretrainLossMixesAttentionAndAlignmentTerms) {
  AsrConfig c = Mini();
  c.ctc_weight = 0.25;
  AsrModel asr(c, 6);
  const Matrix x = Features(12, 2);
  const PhonemeSequence text = {5, 6, corpus::kSpace, 7};
  Rng rng(1);
  Tape t(false);
  Var memory = asr.Encode(t, t.Constant(x));
  const double ce = asr.CeLossFromMemory(t, memory, text, DecoderInputs(text)).value()[0];
  const double ctc = asr.CtcLossFromMemory(t, memory, text).value()[0];
  const double mixed = asr.PretrainLoss(t, t.Constant(x), text, 0.0, rng).value()[0];
  EXPECT_NEAR(mixed, 0.75 * ce + 0.25 * ctc, 1e-12);
}

TEST(Asr, PretrainLossFallsBackToCeWhenTooShortToAlign) {
  AsrModel asr(Mini(), 6);
  const Matrix x = Features(4, 2);  // two encoder steps, four labels
  const PhonemeSequence text = {5, 6, 7, 8};
  Rng rng(1);
  Tape t(false);
  EXPECT_FALSE(asr.CtcLossFromMemory(t, asr.Encode(t, t.Constant(x)), text).valid());
  EXPECT_DOUBLE_EQ(asr.PretrainLoss(t, t.Constant(x), text, 0.0, rng).value()[0],
                   asr.CeLoss(t, t.Constant(x), text).value()[0]);
}

TEST(Asr, CtcWeightRange) {
  AsrConfig c;
  c.ctc_weight = 1.0;
  EXPECT_THROW(c.Validate(), ContractError);
  c.ctc_weight = -0.1;
  EXPECT_THROW(c.Validate(), ContractError);
}

}  // namespace
}  // namespace speechchain
