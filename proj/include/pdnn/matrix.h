// pdnn/matrix.h

// Copyright 2026  The pdnn-cpp Authors

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

#ifndef PDNN_MATRIX_H_
#define PDNN_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdnn {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.  Batches are stored one example per
// row, so a layer maps an (n x in) activation matrix to (n x out).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Takes ownership of `values`, which must hold rows * cols entries.
  Matrix(std::size_t rows, std::size_t cols, Vector values);

  static Matrix FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double &operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> Row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> Row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> Values() { return values_; }
  std::span<const double> Values() const { return values_; }
  double *Data() { return values_.data(); }
  const double *Data() const { return values_.data(); }

  // "RxC", used in error messages.
  std::string ShapeString() const;

  // Bit-exact comparison of shape and values.
  bool operator==(const Matrix &other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector values_;
};

// out[i][j] = sum_k input[i][k] * weights[k][j] + bias[j].
Matrix Affine(const Matrix &input, const Matrix &weights, std::span<const double> bias);

Matrix MatMul(const Matrix &a, const Matrix &b);       // a * b
Matrix MatMulTransA(const Matrix &a, const Matrix &b); // a^T * b
Matrix MatMulTransB(const Matrix &a, const Matrix &b); // a * b^T
Matrix Transpose(const Matrix &m);

// dst += alpha * src.
void AddScaled(double alpha, const Matrix &src, Matrix *dst);
void AddScaled(double alpha, std::span<const double> src, std::span<double> dst);
// Elementwise product, shapes must match.
Matrix Hadamard(const Matrix &a, const Matrix &b);
Matrix Scaled(const Matrix &m, double alpha);
Vector ColumnSums(const Matrix &m);
Vector ColumnMeans(const Matrix &m);
// Rows [begin, begin + count) as a new matrix.
Matrix RowSlice(const Matrix &m, std::size_t begin, std::size_t count);

bool AllFinite(std::span<const double> values);
inline bool AllFinite(const Matrix &m) { return AllFinite(m.Values()); }

enum class ActivationKind { kSigmoid, kTanh, kRectifier, kIdentity };

// Accepts "sigmoid", "tanh", "rectifier" (alias "relu") and "identity"
// (alias "linear"); anything else is a ParseError.
ActivationKind ParseActivation(std::string_view name);
std::string_view ActivationName(ActivationKind kind);

double Activate(ActivationKind kind, double x);
Matrix ApplyActivation(ActivationKind kind, const Matrix &m);
// f'(z) written in terms of y = f(z), which is what the backward pass keeps.
Matrix ActivationDerivFromOutput(ActivationKind kind, const Matrix &output);

double Sigmoid(double x);

// Row-wise softmax with per-row max subtraction.
Matrix SoftmaxRows(const Matrix &m);

}  // namespace pdnn

#endif  // PDNN_MATRIX_H_
