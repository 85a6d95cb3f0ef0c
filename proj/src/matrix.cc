// src/matrix.cc

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

#include "pdnn/matrix.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "pdnn/errors.h"

namespace pdnn {

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap AsEigen(const Matrix &m) {
  return ConstMap(m.Data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

MutMap AsEigen(Matrix &m) {
  return MutMap(m.Data(), static_cast<Eigen::Index>(m.rows()),
                static_cast<Eigen::Index>(m.cols()));
}

[[noreturn]] void ThrowShape(const char *op, const Matrix &a, const Matrix &b) {
  throw ShapeError(std::string(op) + ": shapes " + a.ShapeString() + " and " +
                   b.ShapeString() + " do not conform");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols)
    throw ShapeError("Matrix: " + std::to_string(values_.size()) +
                     " values cannot fill " + std::to_string(rows) + "x" +
                     std::to_string(cols));
}

Matrix Matrix::FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t num_rows = rows.size();
  std::size_t num_cols = num_rows == 0 ? 0 : rows.begin()->size();
  Vector values;
  values.reserve(num_rows * num_cols);
  for (const auto &row : rows) {
    if (row.size() != num_cols)
      throw ShapeError("Matrix::FromRows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(num_rows, num_cols, std::move(values));
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; i++) m(i, i) = 1.0;
  return m;
}

std::string Matrix::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix Affine(const Matrix &input, const Matrix &weights,
              std::span<const double> bias) {
  if (input.cols() != weights.rows())
    ThrowShape("Affine", input, weights);
  if (bias.size() != weights.cols())
    throw ShapeError("Affine: bias of length " + std::to_string(bias.size()) +
                     " does not match weights " + weights.ShapeString());
  Matrix out = MatMul(input, weights);
  for (std::size_t i = 0; i < out.rows(); i++) {
    auto row = out.Row(i);
    for (std::size_t j = 0; j < row.size(); j++) row[j] += bias[j];
  }
  return out;
}

Matrix MatMul(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.rows()) ThrowShape("MatMul", a, b);
  Matrix out(a.rows(), b.cols());
  if (out.empty() || a.cols() == 0) return out;
  AsEigen(out).noalias() = AsEigen(a) * AsEigen(b);
  return out;
}

Matrix MatMulTransA(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows()) ThrowShape("MatMulTransA", a, b);
  Matrix out(a.cols(), b.cols());
  if (out.empty() || a.rows() == 0) return out;
  AsEigen(out).noalias() = AsEigen(a).transpose() * AsEigen(b);
  return out;
}

Matrix MatMulTransB(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.cols()) ThrowShape("MatMulTransB", a, b);
  Matrix out(a.rows(), b.rows());
  if (out.empty() || a.cols() == 0) return out;
  AsEigen(out).noalias() = AsEigen(a) * AsEigen(b).transpose();
  return out;
}

Matrix Transpose(const Matrix &m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); i++)
    for (std::size_t j = 0; j < m.cols(); j++) out(j, i) = m(i, j);
  return out;
}

void AddScaled(double alpha, const Matrix &src, Matrix *dst) {
  if (src.rows() != dst->rows() || src.cols() != dst->cols())
    ThrowShape("AddScaled", src, *dst);
  AddScaled(alpha, src.Values(), dst->Values());
}

void AddScaled(double alpha, std::span<const double> src, std::span<double> dst) {
  if (src.size() != dst.size())
    throw ShapeError("AddScaled: lengths " + std::to_string(src.size()) +
                     " and " + std::to_string(dst.size()) + " differ");
  for (std::size_t i = 0; i < src.size(); i++) dst[i] += alpha * src[i];
}

Matrix Hadamard(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) ThrowShape("Hadamard", a, b);
  Matrix out = a;
  auto o = out.Values();
  auto bv = b.Values();
  for (std::size_t i = 0; i < o.size(); i++) o[i] *= bv[i];
  return out;
}

Matrix Scaled(const Matrix &m, double alpha) {
  Matrix out = m;
  for (double &v : out.Values()) v *= alpha;
  return out;
}

Vector ColumnSums(const Matrix &m) {
  Vector sums(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); i++) {
    auto row = m.Row(i);
    for (std::size_t j = 0; j < row.size(); j++) sums[j] += row[j];
  }
  return sums;
}

Vector ColumnMeans(const Matrix &m) {
  Vector means = ColumnSums(m);
  if (m.rows() > 0)
    for (double &v : means) v /= static_cast<double>(m.rows());
  return means;
}

Matrix RowSlice(const Matrix &m, std::size_t begin, std::size_t count) {
  if (begin + count > m.rows())
    throw ShapeError("RowSlice: rows [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside " +
                     m.ShapeString());
  auto first = m.Values().begin() + static_cast<std::ptrdiff_t>(begin * m.cols());
  Vector values(first, first + static_cast<std::ptrdiff_t>(count * m.cols()));
  return Matrix(count, m.cols(), std::move(values));
}

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

ActivationKind ParseActivation(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::kSigmoid;
  if (name == "tanh") return ActivationKind::kTanh;
  if (name == "rectifier" || name == "relu") return ActivationKind::kRectifier;
  if (name == "identity" || name == "linear") return ActivationKind::kIdentity;
  throw ParseError("unknown activation '" + std::string(name) + "'", 0);
}

std::string_view ActivationName(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid: return "sigmoid";
    case ActivationKind::kTanh: return "tanh";
    case ActivationKind::kRectifier: return "rectifier";
    case ActivationKind::kIdentity: return "identity";
  }
  return "?";
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double Activate(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::kSigmoid: return Sigmoid(x);
    case ActivationKind::kTanh: return std::tanh(x);
    case ActivationKind::kRectifier: return x > 0.0 ? x : 0.0;
    case ActivationKind::kIdentity: return x;
  }
  return x;
}

Matrix ApplyActivation(ActivationKind kind, const Matrix &m) {
  Matrix out = m;
  if (kind == ActivationKind::kIdentity) return out;
  for (double &v : out.Values()) v = Activate(kind, v);
  return out;
}

Matrix ActivationDerivFromOutput(ActivationKind kind, const Matrix &output) {
  Matrix d(output.rows(), output.cols());
  auto y = output.Values();
  auto dv = d.Values();
  for (std::size_t i = 0; i < y.size(); i++) {
    switch (kind) {
      case ActivationKind::kSigmoid: dv[i] = y[i] * (1.0 - y[i]); break;
      case ActivationKind::kTanh: dv[i] = 1.0 - y[i] * y[i]; break;
      case ActivationKind::kRectifier: dv[i] = y[i] > 0.0 ? 1.0 : 0.0; break;
      case ActivationKind::kIdentity: dv[i] = 1.0; break;
    }
  }
  return d;
}

Matrix SoftmaxRows(const Matrix &m) {
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); i++) {
    auto row = out.Row(i);
    if (row.empty()) continue;
    double max = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double &v : row) {
      v = std::exp(v - max);
      sum += v;
    }
    for (double &v : row) v /= sum;
  }
  return out;
}

}  // namespace pdnn
