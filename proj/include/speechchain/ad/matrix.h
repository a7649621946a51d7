// include/speechchain/ad/matrix.h

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

#ifndef SPEECHCHAIN_AD_MATRIX_H_
#define SPEECHCHAIN_AD_MATRIX_H_

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace speechchain {

// Dense row-major matrix of doubles. Every value in the library is rank two;
// vectors are 1 x n and scalars are 1 x 1. Extents are always positive.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);
  Matrix(int rows, int cols, std::vector<double> values);
  static Matrix FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix Scalar(double v) { return Matrix(1, 1, v); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double& operator[](int i) { return data_[i]; }
  double operator[](int i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> Row(int r) { return {data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<const double> Row(int r) const { return {data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  const std::vector<double>& values() const { return data_; }

  void SetZero();
  bool SameShape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string ShapeString() const;

  // Bitwise equality of shape and values.
  bool operator==(const Matrix& o) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

std::string ShapeString(int rows, int cols);

// Largest absolute elementwise difference; throws ShapeError on mismatch.
double MaxAbsDiff(const Matrix& a, const Matrix& b);

}  // namespace speechchain

#endif  // SPEECHCHAIN_AD_MATRIX_H_
