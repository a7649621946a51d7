// src/ad/matrix.cc

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

#include "speechchain/ad/matrix.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "speechchain/errors.h"

namespace speechchain {

std::string ShapeString(int rows, int cols) {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

Matrix::Matrix(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0)
    throw ShapeError("matrix extents must be positive, got " + speechchain::ShapeString(rows, cols));
  data_.assign(static_cast<size_t>(rows) * cols, fill);
}

Matrix::Matrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows <= 0 || cols <= 0)
    throw ShapeError("matrix extents must be positive, got " + speechchain::ShapeString(rows, cols));
  if (data_.size() != static_cast<size_t>(rows) * cols)
    throw ShapeError("value count " + std::to_string(data_.size()) +
                     " does not match shape " + speechchain::ShapeString(rows, cols));
}

Matrix Matrix::FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  std::vector<double> values;
  values.reserve(static_cast<size_t>(r) * c);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw ShapeError("ragged row in matrix literal");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(values));
}

void Matrix::SetZero() { std::fill(data_.begin(), data_.end(), 0.0); }

std::string Matrix::ShapeString() const { return speechchain::ShapeString(rows_, cols_); }

bool Matrix::operator==(const Matrix& o) const {
  return SameShape(o) &&
         (data_.empty() ||
          std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(double)) == 0);
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  if (!a.SameShape(b))
    throw ShapeError("MaxAbsDiff: " + a.ShapeString() + " vs " + b.ShapeString());
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace speechchain
