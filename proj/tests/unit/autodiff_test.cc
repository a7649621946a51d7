// tests/unit/autodiff_test.cc

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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "speechchain/ad/gradcheck.h"
#include "speechchain/ad/ops.h"
#include "speechchain/errors.h"
#include "oracles/brute_force.h"

namespace speechchain::ad {
namespace {

Parameter MakeParam(const std::string& name, Matrix m) {
  Parameter p;
  p.name = name;
  p.grad = Matrix(m.rows(), m.cols());
  p.value = std::move(m);
  return p;
}

// Entries uniform in +-[0.2, 1.5] so kinked primitives stay off their kinks.
Matrix AwayFromZero(int r, int c, Rng& rng) {
  std::uniform_real_distribution<double> mag(0.2, 1.5);
  std::bernoulli_distribution sign(0.5);
  Matrix m(r, c);
  for (int i = 0; i < m.size(); ++i) m[i] = (sign(rng) ? 1 : -1) * mag(rng);
  return m;
}

Matrix Positive(int r, int c, Rng& rng) {
  std::uniform_real_distribution<double> d(0.3, 2.0);
  Matrix m(r, c);
  for (int i = 0; i < m.size(); ++i) m[i] = d(rng);
  return m;
}

TEST(Primitives, IdentityMatMul) {
  Tape t;
  Var eye = t.Constant(Matrix::FromRows({{1, 0}, {0, 1}}));
  Matrix m = Matrix::FromRows({{1.5, -2}, {3, 4.25}});
  Var out = MatMul(eye, t.Constant(m));
  EXPECT_EQ(out.value(), m);
}

TEST(Primitives, SoftmaxOfZerosIsUniform) {
  Tape t;
  Var out = SoftmaxRows(t.Constant(Matrix(1, 4)));
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(out.value()(0, j), 0.25);
}

TEST(Primitives, L1DistanceToSelfIsZero) {
  Rng rng(1);
  Tape t;
  Var x = t.Constant(RandomNormal(3, 5, 1.0, rng));
  EXPECT_EQ(L1Distance(x, x).value()[0], 0.0);
}

TEST(Primitives, ShapeErrorNamesBothShapes) {
  Tape t;
  Var a = t.Constant(Matrix(2, 3));
  Var b = t.Constant(Matrix(4, 5));
  try {
    MatMul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos);
    EXPECT_NE(msg.find("[4x5]"), std::string::npos);
  }
  EXPECT_THROW(Add(a, b), ShapeError);
  EXPECT_THROW(L1Distance(a, b), ShapeError);
}

TEST(Primitives, DomainErrors) {
  Tape t;
  EXPECT_THROW(Log(t.Constant(Matrix::FromRows({{1.0, 0.0}}))), DomainError);
  EXPECT_THROW(Log(t.Constant(Matrix::FromRows({{-1.0}}))), DomainError);
  EXPECT_THROW(SoftmaxRows(t.Constant(Matrix::FromRows({{1.0, NAN}}))), DomainError);
}

TEST(Primitives, BroadcastRowAndScalar) {
  Tape t;
  Var x = t.Constant(Matrix::FromRows({{1, 2}, {3, 4}}));
  Var row = t.Constant(Matrix::FromRows({{10, 20}}));
  EXPECT_EQ(Add(x, row).value(), Matrix::FromRows({{11, 22}, {13, 24}}));
  EXPECT_EQ(Mul(x, t.Constant(Matrix::Scalar(2))).value(), Matrix::FromRows({{2, 4}, {6, 8}}));
  Var col = t.Constant(Matrix::FromRows({{1}, {-1}}));
  EXPECT_EQ(Sub(x, col).value(), Matrix::FromRows({{0, 1}, {4, 5}}));
}

TEST(Primitives, SoftmaxRowsSumToOne) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Tape t;
    Var y = SoftmaxRows(t.Constant(RandomNormal(4, 7, 5.0, rng)));
    for (int i = 0; i < 4; ++i) {
      double s = 0;
      for (double v : y.value().Row(i)) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Primitives, GatherRowsAndConcat) {
  Tape t;
  Var table = t.Constant(Matrix::FromRows({{1, 1}, {2, 2}}));
  const std::vector<int> idx = {0, 0, 1, 1, 1, -1};
  Var g = GatherRows(table, idx);
  EXPECT_EQ(g.value(), Matrix::FromRows({{1, 1}, {1, 1}, {2, 2}, {2, 2}, {2, 2}, {0, 0}}));
  Var c = ConcatCols({table, table});
  EXPECT_EQ(c.value(), Matrix::FromRows({{1, 1, 1, 1}, {2, 2, 2, 2}}));
  Var r = ConcatRows({table, SliceRows(table, 1, 1)});
  EXPECT_EQ(r.value(), Matrix::FromRows({{1, 1}, {2, 2}, {2, 2}}));
}

TEST(Backward, SquareDerivative) {
  Tape t;
  Var x = t.Leaf(Matrix::Scalar(3.0));
  Var y = Mul(x, x);
  t.Backward(y);
  EXPECT_DOUBLE_EQ(t.Grad(x)[0], 6.0);
}

TEST(Backward, CosineOfSelfHasZeroGradient) {
  Rng rng(2);
  Tape t;
  Var a = t.Leaf(RandomNormal(1, 6, 1.0, rng));
  t.Backward(CosineSimilarity(a, a));
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(t.Grad(a)[i], 0.0, 1e-14);
}

TEST(Backward, CrossEntropyGradientIsSoftmaxMinusOneHot) {
  // Two-token vocabulary, target token 1: d/dz [-log softmax(z)[1]] = p - e1.
  const double z0 = 0.3, z1 = -1.1;
  Tape t;
  Var z = t.Leaf(Matrix::FromRows({{z0, z1}}));
  const std::vector<int> target = {1};
  Var loss = Scale(Mean(Pick(LogSoftmaxRows(z), target)), -1.0);
  t.Backward(loss);
  const double p0 = std::exp(z0) / (std::exp(z0) + std::exp(z1));
  const double p1 = 1.0 - p0;
  EXPECT_NEAR(t.Grad(z)[0], p0 - 0.0, 1e-15);
  EXPECT_NEAR(t.Grad(z)[1], p1 - 1.0, 1e-15);
}

TEST(Backward, NonScalarRootRejected) {
  Tape t;
  Var x = t.Leaf(Matrix(2, 2, 1.0));
  EXPECT_THROW(t.Backward(x), ContractError);
}

TEST(Backward, ParameterReuseAccumulates) {
  Parameter p = MakeParam("w", Matrix::Scalar(2.0));
  Tape t;
  Var a = t.Param(p);
  Var b = t.Param(p);
  EXPECT_EQ(a.id(), b.id());
  t.Backward(Add(Mul(a, b), a));  // w^2 + w
  t.AccumulateParamGrads();
  EXPECT_DOUBLE_EQ(p.grad[0], 5.0);
}

TEST(Backward, FrozenParameterGetsNoGradient) {
  Parameter p = MakeParam("w", Matrix::Scalar(2.0));
  p.frozen = true;
  Parameter q = MakeParam("v", Matrix::Scalar(3.0));
  Tape t;
  t.Backward(Mul(t.Param(p), t.Param(q)));
  t.AccumulateParamGrads();
  EXPECT_EQ(p.grad[0], 0.0);
  EXPECT_DOUBLE_EQ(q.grad[0], 2.0);
}

TEST(Backward, Deterministic) {
  auto run = [] {
    Rng rng(99);
    Parameter w = MakeParam("w", RandomNormal(5, 4, 1.0, rng));
    Matrix x = RandomNormal(3, 5, 1.0, rng);
    Tape t;
    Var h = Tanh(MatMul(t.Constant(x), t.Param(w)));
    t.Backward(Sum(SoftmaxRows(Mul(h, h))));
    t.AccumulateParamGrads();
    return w.grad;
  };
  EXPECT_EQ(run(), run());
}

TEST(GradCheck, LinearFunctionExact) {
  Rng rng(4);
  Parameter x = MakeParam("x", RandomNormal(3, 4, 1.0, rng));
  Parameter* in[] = {&x};
  auto r = FiniteDiffCheck([&](Tape& t) { return Sum(t.Param(x)); }, in);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_rel_error, 1e-8);
  EXPECT_EQ(r.coordinates, 12);
}

TEST(GradCheck, ReportsDisagreementWithoutThrowing) {
  // Detach hides the dependence from backward, so the check must fail.
  Parameter x = MakeParam("x", Matrix::FromRows({{1.0, 2.0}}));
  Parameter* in[] = {&x};
  auto r = FiniteDiffCheck([&](Tape& t) { return Sum(Detach(t.Param(x))); }, in);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_rel_error, 0.5);
}

TEST(GradCheck, RejectsBadEpsilon) {
  Parameter x = MakeParam("x", Matrix::Scalar(1.0));
  Parameter* in[] = {&x};
  GradCheckOptions o;
  o.epsilon = 0.1;
  EXPECT_THROW(FiniteDiffCheck([&](Tape& t) { return Sum(t.Param(x)); }, in, o), ContractError);
}

TEST(GradCheck, SpeakerConsistencyOnFourDimEmbeddings) {
  Rng rng(8);
  Parameter a = MakeParam("s_hat", RandomNormal(1, 4, 1.0, rng));
  Parameter b = MakeParam("s_ref", RandomNormal(1, 4, 1.0, rng));
  Parameter* in[] = {&a, &b};
  auto r = FiniteDiffCheck(
      [&](Tape& t) { return Scale(CosineSimilarity(t.Param(a), t.Param(b)), -1.0); }, in);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(Ctc, MatchesEnumerationOfAllFrameLabellings) {
  Rng rng(17);
  const std::vector<std::vector<int>> label_sets = {{1}, {1, 2}, {2, 2}, {1, 2, 1}, {3, 1}};
  for (const auto& labels : label_sets) {
    for (int frames = CtcMinFrames(labels); frames <= 5; ++frames) {
      Tape t(false);
      Var lp = LogSoftmaxRows(t.Constant(RandomNormal(frames, 4, 1.0, rng)));
      const Matrix& v = lp.value();
      const double expected = oracle::CtcPathSum(
          frames, 4, 0, labels, [&](int f, int k) { return std::exp(v(f, k)); });
      EXPECT_NEAR(CtcLoss(lp, labels, 0).value()[0], -std::log(expected), 1e-10)
          << "frames " << frames << " labels " << labels.size();
    }
  }
}

TEST(Ctc, RepeatsNeedBlankBetween) {
  const std::vector<int> twice = {5, 5, 6};
  EXPECT_EQ(CtcMinFrames(twice), 4);
  Tape t(false);
  Var lp = LogSoftmaxRows(t.Constant(Matrix(3, 8)));
  EXPECT_THROW(CtcLoss(lp, twice, 0), DomainError);
  const std::vector<int> with_blank = {0, 5};
  EXPECT_THROW(CtcLoss(lp, with_blank, 0), ContractError);
}

TEST(Ctc, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  Parameter z = MakeParam("z", RandomNormal(6, 5, 1.0, rng));
  const std::vector<int> labels = {2, 2, 4};
  Parameter* in[] = {&z};
  auto r = FiniteDiffCheck(
      [&](Tape& t) { return CtcLoss(LogSoftmaxRows(t.Param(z)), labels, 0); }, in);
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst;
}

// One randomized instance per seed for every primitive; weighting the output
// by a fixed random matrix turns it into a scalar with a generic gradient.
struct PrimitiveCase {
  const char* name;
  std::function<void(Rng&, std::vector<Parameter>&)> make_inputs;
  std::function<Var(Tape&, std::vector<Var>&)> apply;
};

std::vector<PrimitiveCase> AllPrimitives() {
  auto shape = [](Rng& rng) {
    std::uniform_int_distribution<int> d(1, 4);
    return std::pair{d(rng), d(rng)};
  };
  auto two_same = [shape](Rng& rng, std::vector<Parameter>& in) {
    auto [r, c] = shape(rng);
    in.push_back(MakeParam("a", AwayFromZero(r, c, rng)));
    in.push_back(MakeParam("b", AwayFromZero(r, c, rng)));
  };
  auto one = [shape](Rng& rng, std::vector<Parameter>& in) {
    auto [r, c] = shape(rng);
    in.push_back(MakeParam("a", AwayFromZero(r, c, rng)));
  };
  auto positive = [shape](Rng& rng, std::vector<Parameter>& in) {
    auto [r, c] = shape(rng);
    in.push_back(MakeParam("a", Positive(r, c, rng)));
  };
  std::vector<PrimitiveCase> cases = {
      {"matmul",
       [](Rng& rng, std::vector<Parameter>& in) {
         std::uniform_int_distribution<int> d(1, 4);
         const int m = d(rng), k = d(rng), n = d(rng);
         in.push_back(MakeParam("a", AwayFromZero(m, k, rng)));
         in.push_back(MakeParam("b", AwayFromZero(k, n, rng)));
       },
       [](Tape&, std::vector<Var>& v) { return MatMul(v[0], v[1]); }},
      {"matmul_nt",
       [](Rng& rng, std::vector<Parameter>& in) {
         std::uniform_int_distribution<int> d(1, 4);
         const int m = d(rng), k = d(rng), n = d(rng);
         in.push_back(MakeParam("a", AwayFromZero(m, k, rng)));
         in.push_back(MakeParam("b", AwayFromZero(n, k, rng)));
       },
       [](Tape&, std::vector<Var>& v) { return MatMulNT(v[0], v[1]); }},
      {"transpose", one, [](Tape&, std::vector<Var>& v) { return Transpose(v[0]); }},
      {"add", two_same, [](Tape&, std::vector<Var>& v) { return Add(v[0], v[1]); }},
      {"add_row_broadcast",
       [shape](Rng& rng, std::vector<Parameter>& in) {
         auto [r, c] = shape(rng);
         in.push_back(MakeParam("a", AwayFromZero(r, c, rng)));
         in.push_back(MakeParam("b", AwayFromZero(1, c, rng)));
       },
       [](Tape&, std::vector<Var>& v) { return Add(v[0], v[1]); }},
      {"sub", two_same, [](Tape&, std::vector<Var>& v) { return Sub(v[0], v[1]); }},
      {"mul", two_same, [](Tape&, std::vector<Var>& v) { return Mul(v[0], v[1]); }},
      {"mul_scalar_broadcast",
       [shape](Rng& rng, std::vector<Parameter>& in) {
         auto [r, c] = shape(rng);
         in.push_back(MakeParam("a", AwayFromZero(r, c, rng)));
         in.push_back(MakeParam("b", AwayFromZero(1, 1, rng)));
       },
       [](Tape&, std::vector<Var>& v) { return Mul(v[0], v[1]); }},
      {"scale", one, [](Tape&, std::vector<Var>& v) { return Scale(v[0], -1.7); }},
      {"add_scalar", one, [](Tape&, std::vector<Var>& v) { return AddScalar(v[0], 0.3); }},
      {"exp", one, [](Tape&, std::vector<Var>& v) { return Exp(v[0]); }},
      {"log", positive, [](Tape&, std::vector<Var>& v) { return Log(v[0]); }},
      {"tanh", one, [](Tape&, std::vector<Var>& v) { return Tanh(v[0]); }},
      {"relu", one, [](Tape&, std::vector<Var>& v) { return Relu(v[0]); }},
      {"sigmoid", one, [](Tape&, std::vector<Var>& v) { return Sigmoid(v[0]); }},
      {"softmax", one, [](Tape&, std::vector<Var>& v) { return SoftmaxRows(v[0]); }},
      {"log_softmax", one, [](Tape&, std::vector<Var>& v) { return LogSoftmaxRows(v[0]); }},
      {"layer_norm",
       [](Rng& rng, std::vector<Parameter>& in) {
         std::uniform_int_distribution<int> d(1, 4), c(2, 5);
         const int rows = d(rng), cols = c(rng);
         in.push_back(MakeParam("x", AwayFromZero(rows, cols, rng)));
         in.push_back(MakeParam("g", AwayFromZero(1, cols, rng)));
         in.push_back(MakeParam("b", AwayFromZero(1, cols, rng)));
       },
       [](Tape&, std::vector<Var>& v) { return LayerNormRows(v[0], v[1], v[2]); }},
      {"gather_rows", one,
       [](Tape&, std::vector<Var>& v) {
         std::vector<int> idx;
         for (int i = 0; i < v[0].rows(); ++i) idx.insert(idx.end(), {i, i, -1});
         idx.push_back(0);
         return GatherRows(v[0], idx);
       }},
      {"pick", one,
       [](Tape&, std::vector<Var>& v) {
         std::vector<int> idx;
         for (int i = 0; i < v[0].rows(); ++i) idx.push_back(i % v[0].cols());
         return Pick(v[0], idx);
       }},
      {"concat_cols", two_same,
       [](Tape&, std::vector<Var>& v) { return ConcatCols({v[0], v[1], v[0]}); }},
      {"concat_rows", two_same,
       [](Tape&, std::vector<Var>& v) { return ConcatRows({v[1], v[0]}); }},
      {"slice_rows", one,
       [](Tape&, std::vector<Var>& v) { return SliceRows(v[0], v[0].rows() - 1, 1); }},
      {"slice_cols", one,
       [](Tape&, std::vector<Var>& v) { return SliceCols(v[0], 0, v[0].cols()); }},
      {"sum", one, [](Tape&, std::vector<Var>& v) { return Sum(v[0]); }},
      {"mean", one, [](Tape&, std::vector<Var>& v) { return Mean(v[0]); }},
      {"mean_over_rows", one, [](Tape&, std::vector<Var>& v) { return MeanOverRows(v[0]); }},
      {"l1_distance",
       [shape](Rng& rng, std::vector<Parameter>& in) {
         auto [r, c] = shape(rng);
         Matrix a = AwayFromZero(r, c, rng);
         Matrix b = a;
         Matrix off = AwayFromZero(r, c, rng);
         for (int i = 0; i < b.size(); ++i) b[i] += off[i];
         in.push_back(MakeParam("a", a));
         in.push_back(MakeParam("b", b));
       },
       [](Tape&, std::vector<Var>& v) { return L1Distance(v[0], v[1]); }},
      {"squared_l2", two_same,
       [](Tape&, std::vector<Var>& v) { return SquaredL2Distance(v[0], v[1]); }},
      {"l2_norm", one, [](Tape&, std::vector<Var>& v) { return L2Norm(v[0]); }},
      {"dot", two_same, [](Tape&, std::vector<Var>& v) { return Dot(v[0], v[1]); }},
      {"cosine", two_same,
       [](Tape&, std::vector<Var>& v) { return CosineSimilarity(v[0], v[1]); }},
      {"elman_scan",
       [](Rng& rng, std::vector<Parameter>& in) {
         std::uniform_int_distribution<int> d(1, 5), h(1, 4);
         const int steps = d(rng), hidden = h(rng);
         in.push_back(MakeParam("x", AwayFromZero(steps, hidden, rng)));
         in.push_back(MakeParam("u", RandomNormal(hidden, hidden, 0.5, rng)));
       },
       [](Tape&, std::vector<Var>& v) {
         return ConcatCols({ElmanScan(v[0], v[1], false), ElmanScan(v[0], v[1], true)});
       }},
  };
  return cases;
}

TEST(GradCheck, EveryPrimitiveOverHundredSeeds) {
  for (const PrimitiveCase& pc : AllPrimitives()) {
    double worst = 0.0;
    std::string where;
    for (uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed * 7919 + 13);
      std::vector<Parameter> inputs;
      pc.make_inputs(rng, inputs);
      // Output weights depend on the output shape, which is only known after
      // one forward evaluation.
      Matrix weights;
      {
        Tape probe(false);
        std::vector<Var> vars;
        for (Parameter& p : inputs) vars.push_back(probe.Param(p));
        const Matrix& out = pc.apply(probe, vars).value();
        weights = AwayFromZero(out.rows(), out.cols(), rng);
      }
      std::vector<Parameter*> ptrs;
      for (Parameter& p : inputs) ptrs.push_back(&p);
      auto r = FiniteDiffCheck(
          [&](Tape& t) {
            std::vector<Var> vars;
            for (Parameter& p : inputs) vars.push_back(t.Param(p));
            return Sum(Mul(pc.apply(t, vars), t.Constant(weights)));
          },
          ptrs);
      if (r.max_rel_error > worst) {
        worst = r.max_rel_error;
        where = r.worst;
      }
    }
    EXPECT_LT(worst, 1e-4) << pc.name << ": " << where;
  }
}

}  // namespace
}  // namespace speechchain::ad
