// src/ad/ops.cc

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

#include "speechchain/ad/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "speechchain/ad/kernels.h"
#include "speechchain/errors.h"

namespace speechchain::ad {
namespace {

Tape& TapeOf(Var a) {
  if (!a.valid()) throw ContractError("operation on an unbound Var");
  return *a.tape();
}

void RequireSameShape(const char* op, const Matrix& a, const Matrix& b) {
  if (!a.SameShape(b))
    throw ShapeError(std::string(op) + ": shape mismatch " + a.ShapeString() + " vs " +
                     b.ShapeString());
}

struct Broadcast {
  int rows;
  int cols;
};

Broadcast BroadcastShapes(const char* op, const Matrix& a, const Matrix& b) {
  auto dim = [&](int x, int y) {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    throw ShapeError(std::string(op) + ": cannot broadcast " + a.ShapeString() + " with " +
                     b.ShapeString());
  };
  return {dim(a.rows(), b.rows()), dim(a.cols(), b.cols())};
}

inline double At(const Matrix& m, int i, int j) {
  return m(m.rows() == 1 ? 0 : i, m.cols() == 1 ? 0 : j);
}

// Sums `g` (out shape) into `target` (possibly broadcast shape), scaled
// elementwise by `factor(i, j)`.
template <typename F>
void ReduceInto(Matrix& target, const Matrix& g, F factor) {
  const bool rb = target.rows() == 1, cb = target.cols() == 1;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      target(rb ? 0 : i, cb ? 0 : j) += g(i, j) * factor(i, j);
}

template <typename F>
Var Unary(Var a, F fwd_and_deriv) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  for (int i = 0; i < av.size(); ++i) out[i] = fwd_and_deriv(av[i]).first;
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid, fwd_and_deriv](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    const Matrix& x = tp.value(aid);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < g.size(); ++i) ga[i] += g[i] * fwd_and_deriv(x[i]).second;
  });
}

}  // namespace

Var MatMul(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows())
    throw ShapeError("MatMul: inner dimensions differ " + av.ShapeString() + " vs " +
                     bv.ShapeString());
  const int m = av.rows(), k = av.cols(), n = bv.cols();
  Matrix out(m, n);
  kernels::GemmNN(m, k, n, av.data(), bv.data(), out.data());
  const int aid = a.id(), bid = b.id();
  return t.Record(std::move(out), {a, b}, [aid, bid, m, k, n](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(aid))
      kernels::GemmNT(m, n, k, g.data(), tp.value(bid).data(), tp.grad(aid).data());
    if (tp.requires_grad(bid))
      kernels::GemmTN(k, m, n, tp.value(aid).data(), g.data(), tp.grad(bid).data());
  });
}

Var MatMulNT(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.cols())
    throw ShapeError("MatMulNT: inner dimensions differ " + av.ShapeString() + " vs " +
                     bv.ShapeString());
  const int m = av.rows(), k = av.cols(), n = bv.rows();
  Matrix out(m, n);
  kernels::GemmNT(m, k, n, av.data(), bv.data(), out.data());
  const int aid = a.id(), bid = b.id();
  return t.Record(std::move(out), {a, b}, [aid, bid, m, k, n](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(aid))
      kernels::GemmNN(m, n, k, g.data(), tp.value(bid).data(), tp.grad(aid).data());
    if (tp.requires_grad(bid))
      kernels::GemmTN(n, m, k, g.data(), tp.value(aid).data(), tp.grad(bid).data());
  });
}

Var Transpose(Var a) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  Matrix out(av.cols(), av.rows());
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) out(j, i) = av(i, j);
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < ga.rows(); ++i)
      for (int j = 0; j < ga.cols(); ++j) ga(i, j) += g(j, i);
  });
}

Var Add(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Broadcast s = BroadcastShapes("Add", av, bv);
  Matrix out(s.rows, s.cols);
  if (av.SameShape(bv)) {
    for (int i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  } else {
    for (int i = 0; i < s.rows; ++i)
      for (int j = 0; j < s.cols; ++j) out(i, j) = At(av, i, j) + At(bv, i, j);
  }
  const int aid = a.id(), bid = b.id();
  return t.Record(std::move(out), {a, b}, [aid, bid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    auto one = [](int, int) { return 1.0; };
    if (tp.requires_grad(aid)) ReduceInto(tp.grad(aid), g, one);
    if (tp.requires_grad(bid)) ReduceInto(tp.grad(bid), g, one);
  });
}

Var Sub(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Broadcast s = BroadcastShapes("Sub", av, bv);
  Matrix out(s.rows, s.cols);
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j) out(i, j) = At(av, i, j) - At(bv, i, j);
  const int aid = a.id(), bid = b.id();
  return t.Record(std::move(out), {a, b}, [aid, bid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(aid)) ReduceInto(tp.grad(aid), g, [](int, int) { return 1.0; });
    if (tp.requires_grad(bid)) ReduceInto(tp.grad(bid), g, [](int, int) { return -1.0; });
  });
}

Var Mul(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Broadcast s = BroadcastShapes("Mul", av, bv);
  Matrix out(s.rows, s.cols);
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j) out(i, j) = At(av, i, j) * At(bv, i, j);
  const int aid = a.id(), bid = b.id();
  return t.Record(std::move(out), {a, b}, [aid, bid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    const Matrix& x = tp.value(aid);
    const Matrix& y = tp.value(bid);
    if (tp.requires_grad(aid))
      ReduceInto(tp.grad(aid), g, [&](int i, int j) { return At(y, i, j); });
    if (tp.requires_grad(bid))
      ReduceInto(tp.grad(bid), g, [&](int i, int j) { return At(x, i, j); });
  });
}

Var Scale(Var a, double s) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  for (int i = 0; i < av.size(); ++i) out[i] = av[i] * s;
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid, s](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < g.size(); ++i) ga[i] += g[i] * s;
  });
}

Var AddScalar(Var a, double s) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  for (int i = 0; i < av.size(); ++i) out[i] = av[i] + s;
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var Exp(Var a) {
  return Unary(a, [](double x) {
    const double e = std::exp(x);
    return std::pair{e, e};
  });
}

Var Log(Var a) {
  const Matrix& av = a.value();
  for (int i = 0; i < av.size(); ++i)
    if (!(av[i] > 0.0))
      throw DomainError("Log: nonpositive entry " + std::to_string(av[i]) + " at index " +
                        std::to_string(i));
  return Unary(a, [](double x) { return std::pair{std::log(x), 1.0 / x}; });
}

Var Tanh(Var a) {
  return Unary(a, [](double x) {
    const double y = std::tanh(x);
    return std::pair{y, 1.0 - y * y};
  });
}

Var Relu(Var a) {
  return Unary(a, [](double x) { return std::pair{x > 0.0 ? x : 0.0, x > 0.0 ? 1.0 : 0.0}; });
}

Var Sigmoid(Var a) {
  return Unary(a, [](double x) {
    const double y = 1.0 / (1.0 + std::exp(-x));
    return std::pair{y, y * (1.0 - y)};
  });
}

namespace {
void CheckFinite(const char* op, const Matrix& m) {
  for (int i = 0; i < m.size(); ++i)
    if (!std::isfinite(m[i]))
      throw DomainError(std::string(op) + ": non-finite input at index " + std::to_string(i));
}
}  // namespace

Var SoftmaxRows(Var a) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  CheckFinite("SoftmaxRows", av);
  Matrix out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i) {
    auto x = av.Row(i);
    auto y = out.Row(i);
    const double mx = *std::max_element(x.begin(), x.end());
    double z = 0.0;
    for (size_t j = 0; j < x.size(); ++j) z += (y[j] = std::exp(x[j] - mx));
    for (double& v : y) v /= z;
  }
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    const Matrix& y = tp.value(self);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (int j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
      for (int j = 0; j < y.cols(); ++j) ga(i, j) += y(i, j) * (g(i, j) - dot);
    }
  });
}

Var LogSoftmaxRows(Var a) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  CheckFinite("LogSoftmaxRows", av);
  Matrix out(av.rows(), av.cols());
  for (int i = 0; i < av.rows(); ++i) {
    auto x = av.Row(i);
    auto y = out.Row(i);
    const double mx = *std::max_element(x.begin(), x.end());
    double z = 0.0;
    for (double v : x) z += std::exp(v - mx);
    const double lse = mx + std::log(z);
    for (size_t j = 0; j < x.size(); ++j) y[j] = x[j] - lse;
  }
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    const Matrix& y = tp.value(self);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < y.rows(); ++i) {
      double gsum = 0.0;
      for (int j = 0; j < y.cols(); ++j) gsum += g(i, j);
      for (int j = 0; j < y.cols(); ++j) ga(i, j) += g(i, j) - std::exp(y(i, j)) * gsum;
    }
  });
}

Var LayerNormRows(Var x, Var gain, Var bias, double eps) {
  Tape& t = TapeOf(x);
  const Matrix& xv = x.value();
  const Matrix& gv = gain.value();
  const Matrix& bv = bias.value();
  if (gv.rows() != 1 || gv.cols() != xv.cols())
    throw ShapeError("LayerNormRows: gain " + gv.ShapeString() + " vs input " + xv.ShapeString());
  if (!bv.SameShape(gv))
    throw ShapeError("LayerNormRows: bias " + bv.ShapeString() + " vs gain " + gv.ShapeString());
  const int r = xv.rows(), c = xv.cols();
  Matrix normed(r, c);
  std::vector<double> inv_std(r);
  Matrix out(r, c);
  for (int i = 0; i < r; ++i) {
    double mean = 0.0;
    for (int j = 0; j < c; ++j) mean += xv(i, j);
    mean /= c;
    double var = 0.0;
    for (int j = 0; j < c; ++j) var += (xv(i, j) - mean) * (xv(i, j) - mean);
    var /= c;
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < c; ++j) {
      normed(i, j) = (xv(i, j) - mean) * inv_std[i];
      out(i, j) = normed(i, j) * gv(0, j) + bv(0, j);
    }
  }
  const int xid = x.id(), gid = gain.id(), bid = bias.id();
  return t.Record(std::move(out), {x, gain, bias},
                  [xid, gid, bid, normed = std::move(normed), inv_std = std::move(inv_std)](
                      Tape& tp, int self) {
                    const Matrix& g = tp.grad(self);
                    const int r = g.rows(), c = g.cols();
                    if (tp.requires_grad(gid)) {
                      Matrix& gg = tp.grad(gid);
                      for (int i = 0; i < r; ++i)
                        for (int j = 0; j < c; ++j) gg(0, j) += g(i, j) * normed(i, j);
                    }
                    if (tp.requires_grad(bid)) {
                      Matrix& gb = tp.grad(bid);
                      for (int i = 0; i < r; ++i)
                        for (int j = 0; j < c; ++j) gb(0, j) += g(i, j);
                    }
                    if (tp.requires_grad(xid)) {
                      const Matrix& gv = tp.value(gid);
                      Matrix& gx = tp.grad(xid);
                      std::vector<double> dn(c);
                      for (int i = 0; i < r; ++i) {
                        double mean_dn = 0.0, mean_dn_n = 0.0;
                        for (int j = 0; j < c; ++j) {
                          dn[j] = g(i, j) * gv(0, j);
                          mean_dn += dn[j];
                          mean_dn_n += dn[j] * normed(i, j);
                        }
                        mean_dn /= c;
                        mean_dn_n /= c;
                        for (int j = 0; j < c; ++j)
                          gx(i, j) += inv_std[i] * (dn[j] - mean_dn - normed(i, j) * mean_dn_n);
                      }
                    }
                  });
}

Var GatherRows(Var table, std::span<const int> indices) {
  Tape& t = TapeOf(table);
  const Matrix& tv = table.value();
  if (indices.empty()) throw ContractError("GatherRows: empty index list");
  const int c = tv.cols();
  Matrix out(static_cast<int>(indices.size()), c);
  for (size_t i = 0; i < indices.size(); ++i) {
    const int src = indices[i];
    if (src < -1 || src >= tv.rows())
      throw ContractError("GatherRows: index " + std::to_string(src) + " out of range for " +
                          tv.ShapeString());
    if (src >= 0) std::copy_n(tv.data() + static_cast<size_t>(src) * c, c, out.data() + i * c);
  }
  const int tid = table.id();
  std::vector<int> idx(indices.begin(), indices.end());
  return t.Record(std::move(out), {table}, [tid, idx = std::move(idx), c](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix& gt = tp.grad(tid);
    for (size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0) continue;
      double* dst = gt.data() + static_cast<size_t>(idx[i]) * c;
      const double* src = g.data() + i * c;
      for (int j = 0; j < c; ++j) dst[j] += src[j];
    }
  });
}

Var Pick(Var a, std::span<const int> indices) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  if (static_cast<int>(indices.size()) != av.rows())
    throw ShapeError("Pick: " + std::to_string(indices.size()) + " indices for " +
                     av.ShapeString());
  Matrix out(av.rows(), 1);
  for (int i = 0; i < av.rows(); ++i) {
    if (indices[i] < 0 || indices[i] >= av.cols())
      throw ContractError("Pick: index " + std::to_string(indices[i]) + " out of range for " +
                          av.ShapeString());
    out(i, 0) = av(i, indices[i]);
  }
  const int aid = a.id();
  std::vector<int> idx(indices.begin(), indices.end());
  return t.Record(std::move(out), {a}, [aid, idx = std::move(idx)](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad(aid);
    for (size_t i = 0; i < idx.size(); ++i) ga(static_cast<int>(i), idx[i]) += g(static_cast<int>(i), 0);
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("ConcatCols: no operands");
  Tape& t = TapeOf(parts[0]);
  const int r = parts[0].rows();
  int c = 0;
  std::vector<int> offsets;
  for (const Var& p : parts) {
    if (p.rows() != r)
      throw ShapeError("ConcatCols: row mismatch " + parts[0].value().ShapeString() + " vs " +
                       p.value().ShapeString());
    offsets.push_back(c);
    c += p.cols();
  }
  Matrix out(r, c);
  for (size_t k = 0; k < parts.size(); ++k) {
    const Matrix& pv = parts[k].value();
    for (int i = 0; i < r; ++i)
      std::copy_n(pv.data() + static_cast<size_t>(i) * pv.cols(), pv.cols(), &out(i, offsets[k]));
  }
  std::vector<int> ids;
  for (const Var& p : parts) ids.push_back(p.id());
  return t.Record(std::move(out), parts,
                  [ids = std::move(ids), offsets = std::move(offsets)](Tape& tp, int self) {
                    const Matrix& g = tp.grad(self);
                    for (size_t k = 0; k < ids.size(); ++k) {
                      if (!tp.requires_grad(ids[k])) continue;
                      Matrix& gp = tp.grad(ids[k]);
                      for (int i = 0; i < gp.rows(); ++i)
                        for (int j = 0; j < gp.cols(); ++j) gp(i, j) += g(i, offsets[k] + j);
                    }
                  });
}

Var ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("ConcatRows: no operands");
  Tape& t = TapeOf(parts[0]);
  const int c = parts[0].cols();
  int r = 0;
  std::vector<int> offsets;
  for (const Var& p : parts) {
    if (p.cols() != c)
      throw ShapeError("ConcatRows: column mismatch " + parts[0].value().ShapeString() + " vs " +
                       p.value().ShapeString());
    offsets.push_back(r);
    r += p.rows();
  }
  Matrix out(r, c);
  for (size_t k = 0; k < parts.size(); ++k) {
    const Matrix& pv = parts[k].value();
    std::copy_n(pv.data(), pv.size(), out.data() + static_cast<size_t>(offsets[k]) * c);
  }
  std::vector<int> ids;
  for (const Var& p : parts) ids.push_back(p.id());
  return t.Record(std::move(out), parts,
                  [ids = std::move(ids), offsets = std::move(offsets), c](Tape& tp, int self) {
                    const Matrix& g = tp.grad(self);
                    for (size_t k = 0; k < ids.size(); ++k) {
                      if (!tp.requires_grad(ids[k])) continue;
                      Matrix& gp = tp.grad(ids[k]);
                      const double* src = g.data() + static_cast<size_t>(offsets[k]) * c;
                      for (int i = 0; i < gp.size(); ++i) gp[i] += src[i];
                    }
                  });
}

Var SliceRows(Var a, int begin, int count) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  if (begin < 0 || count <= 0 || begin + count > av.rows())
    throw ShapeError("SliceRows: rows [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") of " + av.ShapeString());
  const int c = av.cols();
  std::vector<double> vals(av.data() + static_cast<size_t>(begin) * c,
                           av.data() + static_cast<size_t>(begin + count) * c);
  const int aid = a.id();
  return t.Record(Matrix(count, c, std::move(vals)), {a}, [aid, begin, c](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    double* dst = tp.grad(aid).data() + static_cast<size_t>(begin) * c;
    for (int i = 0; i < g.size(); ++i) dst[i] += g[i];
  });
}

Var SliceCols(Var a, int begin, int count) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  if (begin < 0 || count <= 0 || begin + count > av.cols())
    throw ShapeError("SliceCols: cols [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") of " + av.ShapeString());
  Matrix out(av.rows(), count);
  for (int i = 0; i < av.rows(); ++i) std::copy_n(av.data() + static_cast<size_t>(i) * av.cols() + begin, count, &out(i, 0));
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid, begin, count](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < count; ++j) ga(i, begin + j) += g(i, j);
  });
}

Var Sum(Var a) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  double s = 0.0;
  for (int i = 0; i < av.size(); ++i) s += av[i];
  const int aid = a.id();
  return t.Record(Matrix::Scalar(s), {a}, [aid](Tape& tp, int self) {
    const double g = tp.grad(self)[0];
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var Mean(Var a) { return Scale(Sum(a), 1.0 / a.value().size()); }

Var MeanOverRows(Var a) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  Matrix out(1, av.cols());
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) out(0, j) += av(i, j);
  for (int j = 0; j < av.cols(); ++j) out(0, j) /= av.rows();
  const int aid = a.id();
  return t.Record(std::move(out), {a}, [aid](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad(aid);
    const double inv = 1.0 / ga.rows();
    for (int i = 0; i < ga.rows(); ++i)
      for (int j = 0; j < ga.cols(); ++j) ga(i, j) += g(0, j) * inv;
  });
}

Var L1Distance(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  RequireSameShape("L1Distance", av, bv);
  double s = 0.0;
  for (int i = 0; i < av.size(); ++i) s += std::abs(av[i] - bv[i]);
  const int aid = a.id(), bid = b.id();
  return t.Record(Matrix::Scalar(s), {a, b}, [aid, bid](Tape& tp, int self) {
    const double g = tp.grad(self)[0];
    const Matrix& x = tp.value(aid);
    const Matrix& y = tp.value(bid);
    auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    if (tp.requires_grad(aid)) {
      Matrix& ga = tp.grad(aid);
      for (int i = 0; i < ga.size(); ++i) ga[i] += g * sign(x[i] - y[i]);
    }
    if (tp.requires_grad(bid)) {
      Matrix& gb = tp.grad(bid);
      for (int i = 0; i < gb.size(); ++i) gb[i] -= g * sign(x[i] - y[i]);
    }
  });
}

Var SquaredL2Distance(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  RequireSameShape("SquaredL2Distance", av, bv);
  double s = 0.0;
  for (int i = 0; i < av.size(); ++i) s += (av[i] - bv[i]) * (av[i] - bv[i]);
  const int aid = a.id(), bid = b.id();
  return t.Record(Matrix::Scalar(s), {a, b}, [aid, bid](Tape& tp, int self) {
    const double g = tp.grad(self)[0];
    const Matrix& x = tp.value(aid);
    const Matrix& y = tp.value(bid);
    if (tp.requires_grad(aid)) {
      Matrix& ga = tp.grad(aid);
      for (int i = 0; i < ga.size(); ++i) ga[i] += 2.0 * g * (x[i] - y[i]);
    }
    if (tp.requires_grad(bid)) {
      Matrix& gb = tp.grad(bid);
      for (int i = 0; i < gb.size(); ++i) gb[i] -= 2.0 * g * (x[i] - y[i]);
    }
  });
}

Var L2Norm(Var a) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  double s = 0.0;
  for (int i = 0; i < av.size(); ++i) s += av[i] * av[i];
  const double norm = std::sqrt(s);
  const int aid = a.id();
  return t.Record(Matrix::Scalar(norm), {a}, [aid, norm](Tape& tp, int self) {
    if (norm == 0.0) return;
    const double g = tp.grad(self)[0];
    const Matrix& x = tp.value(aid);
    Matrix& ga = tp.grad(aid);
    for (int i = 0; i < ga.size(); ++i) ga[i] += g * x[i] / norm;
  });
}

Var Dot(Var a, Var b) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  RequireSameShape("Dot", av, bv);
  double s = 0.0;
  for (int i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  const int aid = a.id(), bid = b.id();
  return t.Record(Matrix::Scalar(s), {a, b}, [aid, bid](Tape& tp, int self) {
    const double g = tp.grad(self)[0];
    const Matrix& x = tp.value(aid);
    const Matrix& y = tp.value(bid);
    if (tp.requires_grad(aid)) {
      Matrix& ga = tp.grad(aid);
      for (int i = 0; i < ga.size(); ++i) ga[i] += g * y[i];
    }
    if (tp.requires_grad(bid)) {
      Matrix& gb = tp.grad(bid);
      for (int i = 0; i < gb.size(); ++i) gb[i] += g * x[i];
    }
  });
}

Var CosineSimilarity(Var a, Var b, double eps) {
  Tape& t = TapeOf(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  RequireSameShape("CosineSimilarity", av, bv);
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (int i = 0; i < av.size(); ++i) {
    dot += av[i] * bv[i];
    na2 += av[i] * av[i];
    nb2 += bv[i] * bv[i];
  }
  const double na = std::sqrt(na2), nb = std::sqrt(nb2);
  const double denom = std::max(na * nb, eps);
  const bool clamped = na * nb < eps;
  const double cos = dot / denom;
  const int aid = a.id(), bid = b.id();
  return t.Record(Matrix::Scalar(cos), {a, b},
                  [aid, bid, dot, na, nb, denom, clamped](Tape& tp, int self) {
                    const double g = tp.grad(self)[0];
                    const Matrix& x = tp.value(aid);
                    const Matrix& y = tp.value(bid);
                    // d cos / dx = y / denom - dot x / (|x|^2 denom) when unclamped.
                    if (tp.requires_grad(aid)) {
                      Matrix& ga = tp.grad(aid);
                      const double k = (clamped || na == 0.0) ? 0.0 : dot / (na * na * denom);
                      for (int i = 0; i < ga.size(); ++i) ga[i] += g * (y[i] / denom - k * x[i]);
                    }
                    if (tp.requires_grad(bid)) {
                      Matrix& gb = tp.grad(bid);
                      const double k = (clamped || nb == 0.0) ? 0.0 : dot / (nb * nb * denom);
                      for (int i = 0; i < gb.size(); ++i) gb[i] += g * (x[i] / denom - k * y[i]);
                    }
                  });
}

Var ElmanScan(Var input, Var recurrent, bool reverse) {
  Tape& t = TapeOf(input);
  const Matrix& xv = input.value();
  const Matrix& uv = recurrent.value();
  const int steps = xv.rows(), h = xv.cols();
  if (uv.rows() != h || uv.cols() != h)
    throw ShapeError("ElmanScan: recurrent " + uv.ShapeString() + " vs input " +
                     xv.ShapeString());
  Matrix out(steps, h);
  std::vector<double> pre(h);
  for (int s = 0; s < steps; ++s) {
    const int row = reverse ? steps - 1 - s : s;
    const int prev = reverse ? row + 1 : row - 1;
    for (int j = 0; j < h; ++j) pre[j] = xv(row, j);
    if (s > 0) kernels::GemmNN(1, h, h, &out(prev, 0), uv.data(), pre.data());
    for (int j = 0; j < h; ++j) out(row, j) = std::tanh(pre[j]);
  }
  const int xid = input.id(), uid = recurrent.id();
  return t.Record(std::move(out), {input, recurrent}, [xid, uid, reverse](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    const Matrix& hs = tp.value(self);
    const Matrix& u = tp.value(uid);
    const int steps = hs.rows(), h = hs.cols();
    // Backpropagation through time: carry the state gradient from the last
    // step of the scan to the first.
    std::vector<double> carry(h, 0.0), dpre(h), ut(static_cast<size_t>(h) * h);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j) ut[static_cast<size_t>(j) * h + i] = u(i, j);
    Matrix dpre_all(steps, h);
    for (int s = steps - 1; s >= 0; --s) {
      const int row = reverse ? steps - 1 - s : s;
      for (int j = 0; j < h; ++j) {
        const double y = hs(row, j);
        dpre[j] = (g(row, j) + carry[j]) * (1.0 - y * y);
        dpre_all(row, j) = dpre[j];
      }
      std::fill(carry.begin(), carry.end(), 0.0);
      if (s > 0) kernels::GemmNN(1, h, h, dpre.data(), ut.data(), carry.data());
    }
    if (tp.requires_grad(xid)) {
      Matrix& gx = tp.grad(xid);
      for (int i = 0; i < gx.size(); ++i) gx[i] += dpre_all[i];
    }
    if (tp.requires_grad(uid)) {
      Matrix& gu = tp.grad(uid);
      for (int s = 1; s < steps; ++s) {
        const int row = reverse ? steps - 1 - s : s;
        const int prev = reverse ? row + 1 : row - 1;
        kernels::GemmTN(h, 1, h, hs.data() + static_cast<size_t>(prev) * h, &dpre_all(row, 0), gu.data());
      }
    }
  });
}

int CtcMinFrames(std::span<const int> labels) {
  int n = static_cast<int>(labels.size());
  for (size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}
}  // namespace

Var CtcLoss(Var log_probs, std::span<const int> labels, int blank) {
  Tape& t = TapeOf(log_probs);
  const Matrix& lp = log_probs.value();
  const int frames = lp.rows(), vocab = lp.cols();
  if (blank < 0 || blank >= vocab) throw ContractError("CtcLoss: blank out of range");
  for (int l : labels)
    if (l < 0 || l >= vocab || l == blank) throw ContractError("CtcLoss: bad label");
  if (frames < CtcMinFrames(labels))
    throw DomainError("CtcLoss: " + std::to_string(frames) + " frames cannot carry " +
                      std::to_string(labels.size()) + " labels");

  // Extended sequence: blank, l1, blank, l2, ..., blank.
  const int states = 2 * static_cast<int>(labels.size()) + 1;
  std::vector<int> ext(states, blank);
  for (size_t i = 0; i < labels.size(); ++i) ext[2 * i + 1] = labels[i];
  auto skip_ok = [&](int s) { return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]; };

  Matrix alpha(frames, states, kNegInf), beta(frames, states, kNegInf);
  alpha(0, 0) = lp(0, ext[0]);
  if (states > 1) alpha(0, 1) = lp(0, ext[1]);
  for (int f = 1; f < frames; ++f)
    for (int s = 0; s < states; ++s) {
      double a = alpha(f - 1, s);
      if (s >= 1) a = LogAdd(a, alpha(f - 1, s - 1));
      if (skip_ok(s)) a = LogAdd(a, alpha(f - 1, s - 2));
      if (a != kNegInf) alpha(f, s) = a + lp(f, ext[s]);
    }
  beta(frames - 1, states - 1) = lp(frames - 1, ext[states - 1]);
  if (states > 1) beta(frames - 1, states - 2) = lp(frames - 1, ext[states - 2]);
  for (int f = frames - 2; f >= 0; --f)
    for (int s = 0; s < states; ++s) {
      double b = beta(f + 1, s);
      if (s + 1 < states) b = LogAdd(b, beta(f + 1, s + 1));
      if (s + 2 < states && skip_ok(s + 2)) b = LogAdd(b, beta(f + 1, s + 2));
      if (b != kNegInf) beta(f, s) = b + lp(f, ext[s]);
    }
  double total = alpha(frames - 1, states - 1);
  if (states > 1) total = LogAdd(total, alpha(frames - 1, states - 2));

  // Occupancy of each (frame, symbol); the gradient of the loss is its negation.
  Matrix occupancy(frames, vocab);
  for (int f = 0; f < frames; ++f)
    for (int s = 0; s < states; ++s) {
      const double g = alpha(f, s) + beta(f, s) - lp(f, ext[s]) - total;
      if (g != kNegInf) occupancy(f, ext[s]) += std::exp(g);
    }
  Matrix out(1, 1);
  out[0] = -total;
  const int id = log_probs.id();
  return t.Record(std::move(out), {log_probs},
                  [id, occ = std::move(occupancy)](Tape& tp, int self) {
                    if (!tp.requires_grad(id)) return;
                    const double g = tp.grad(self)[0];
                    Matrix& gl = tp.grad(id);
                    for (int i = 0; i < gl.size(); ++i) gl[i] -= g * occ[i];
                  });
}

Var Detach(Var a) { return TapeOf(a).Constant(a.value()); }

}  // namespace speechchain::ad
