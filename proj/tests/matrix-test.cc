// tests/matrix-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pdnn/errors.h"
#include "pdnn/matrix.h"
#include "pdnn/random.h"
#include "test-util.h"

using namespace pdnn;
using pdnn::testing::RandomMatrix;

TEST_CASE("affine: identity, zero input and hand-computed map") {
  Vector zero_bias{0.0, 0.0};
  CHECK(Affine(Matrix::FromRows({{1, 2}}), Matrix::Identity(2), zero_bias) ==
        Matrix::FromRows({{1, 2}}));

  Vector bias{3.0, 4.0};
  CHECK(Affine(Matrix::FromRows({{0, 0}}), Matrix::FromRows({{5, -1}, {7, 9}}), bias) ==
        Matrix::FromRows({{3, 4}}));

  Vector ones{1.0, 1.0};
  CHECK(Affine(Matrix::FromRows({{1, 2}}), Matrix::FromRows({{1, 2}, {3, 4}}), ones) ==
        Matrix::FromRows({{8, 11}}));
}

TEST_CASE("affine: shape errors name both shapes") {
  Vector bias{0.0, 0.0};
  try {
    Affine(Matrix(1, 3), Matrix(2, 2), bias);
    FAIL("expected ShapeError");
  } catch (const ShapeError &e) {
    std::string what = e.what();
    CHECK(what.find("1x3") != std::string::npos);
    CHECK(what.find("2x2") != std::string::npos);
  }
  Vector short_bias{0.0};
  CHECK_THROWS_AS(Affine(Matrix(1, 2), Matrix(2, 2), short_bias), ShapeError);
}

TEST_CASE("affine is linear without bias") {
  SeededRng rng(11);
  for (int trial = 0; trial < 50; trial++) {
    std::size_t n = 1 + rng.Below(4), d = 1 + rng.Below(6), h = 1 + rng.Below(6);
    Matrix x = RandomMatrix(rng, n, d), y = RandomMatrix(rng, n, d), w = RandomMatrix(rng, d, h);
    double a = rng.Gaussian(), b = rng.Gaussian();
    Vector zero(h, 0.0);
    Matrix combo = Scaled(x, a);
    AddScaled(b, y, &combo);
    Matrix lhs = Affine(combo, w, zero);
    Matrix rhs = Scaled(Affine(x, w, zero), a);
    AddScaled(b, Affine(y, w, zero), &rhs);
    for (std::size_t i = 0; i < lhs.size(); i++) {
      double scale = std::max(1.0, std::abs(rhs.Values()[i]));
      CHECK(std::abs(lhs.Values()[i] - rhs.Values()[i]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("transposed products agree with explicit transposes") {
  SeededRng rng(3);
  Matrix a = RandomMatrix(rng, 4, 3), b = RandomMatrix(rng, 4, 5), c = RandomMatrix(rng, 6, 3);
  Matrix ta = MatMulTransA(a, b), ref_a = MatMul(Transpose(a), b);
  Matrix tb = MatMulTransB(a, c), ref_b = MatMul(a, Transpose(c));
  for (std::size_t i = 0; i < ta.size(); i++)
    CHECK(ta.Values()[i] == doctest::Approx(ref_a.Values()[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < tb.size(); i++)
    CHECK(tb.Values()[i] == doctest::Approx(ref_b.Values()[i]).epsilon(1e-12));
}

TEST_CASE("activations at their definition points") {
  CHECK(Activate(ActivationKind::kSigmoid, 0.0) == 0.5);
  CHECK(Activate(ActivationKind::kTanh, 0.0) == 0.0);
  CHECK(Activate(ActivationKind::kRectifier, -3.2) == 0.0);
  CHECK(Activate(ActivationKind::kRectifier, 3.2) == 3.2);
  CHECK(Activate(ActivationKind::kIdentity, -1.5) == -1.5);
  Matrix m = ApplyActivation(ActivationKind::kSigmoid, Matrix::FromRows({{0, 0}, {0, 0}}));
  CHECK(m == Matrix(2, 2, 0.5));
}

TEST_CASE("activation names parse and unknown names are rejected") {
  for (auto kind : {ActivationKind::kSigmoid, ActivationKind::kTanh, ActivationKind::kRectifier,
                    ActivationKind::kIdentity})
    CHECK(ParseActivation(ActivationName(kind)) == kind);
  CHECK_THROWS_AS(ParseActivation("softsign"), ParseError);
}

TEST_CASE("activation derivative from output matches finite differences") {
  for (auto kind : {ActivationKind::kSigmoid, ActivationKind::kTanh, ActivationKind::kIdentity,
                    ActivationKind::kRectifier}) {
    for (double z : {-2.0, -0.3, 0.7, 1.9}) {
      double h = 1e-6;
      double numeric = (Activate(kind, z + h) - Activate(kind, z - h)) / (2 * h);
      Matrix y(1, 1, Activate(kind, z));
      CHECK(ActivationDerivFromOutput(kind, y)(0, 0) == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("softmax rows") {
  Matrix half = SoftmaxRows(Matrix::FromRows({{0, 0}}));
  CHECK(half(0, 0) == 0.5);
  CHECK(half(0, 1) == 0.5);

  for (double c : {-7.0, 0.0, 3.5, 200.0}) {
    Matrix p = SoftmaxRows(Matrix::FromRows({{c, c + std::log(3.0)}}));
    CHECK(p(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p(0, 1) == doctest::Approx(0.75).epsilon(1e-12));
  }

  Matrix big = SoftmaxRows(Matrix::FromRows({{1000, 1000}}));
  CHECK(big(0, 0) == 0.5);
  CHECK(big(0, 1) == 0.5);
  CHECK(AllFinite(big));
}

TEST_CASE("softmax rows sum to one and ignore row shifts") {
  SeededRng rng(5);
  for (int trial = 0; trial < 100; trial++) {
    Matrix m = RandomMatrix(rng, 3, 1 + rng.Below(10), 20.0);
    Matrix p = SoftmaxRows(m);
    Matrix shifted = m;
    double shift = 100.0 * rng.Gaussian();
    for (std::size_t c = 0; c < m.cols(); c++) shifted(1, c) += shift;
    Matrix q = SoftmaxRows(shifted);
    for (std::size_t i = 0; i < p.rows(); i++) {
      double sum = 0.0;
      for (double v : p.Row(i)) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-10);
      for (std::size_t c = 0; c < p.cols(); c++) CHECK(std::abs(p(i, c) - q(i, c)) <= 1e-10);
    }
  }
}

TEST_CASE("rng: known-answer sequence") {
  // Independent reference implementation of splitmix64-seeded xoshiro256**.
  SeededRng zero(0);
  CHECK(zero.NextU64() == 0x99ec5f36cb75f2b4ULL);
  CHECK(zero.NextU64() == 0xbf6e1f784956452aULL);
  CHECK(zero.NextU64() == 0x1a5f849d4933e6e0ULL);
  SeededRng answer(42);
  CHECK(answer.NextU64() == 0x15780b2e0c2ec716ULL);
  SeededRng seven(7);
  CHECK(seven.Uniform() == 0.7005764821796896);
}

TEST_CASE("rng: Below is in range and covers it") {
  SeededRng rng(9);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; i++) seen[rng.Below(7)]++;
  for (int count : seen) CHECK(count > 800);
  CHECK_THROWS_AS(rng.Below(0), DomainError);
}

TEST_CASE("sample_bernoulli") {
  SeededRng rng(1);
  CHECK(SampleBernoulli(rng, Matrix(10, 10, 0.0)) == Matrix(10, 10, 0.0));
  CHECK(SampleBernoulli(rng, Matrix(10, 10, 1.0)) == Matrix(10, 10, 1.0));

  // Binomial standard error at p = 0.2, n = 1e5 is ~0.0013; 0.01 is ~8 sigma.
  Matrix draws = SampleBernoulli(rng, Matrix(1000, 100, 0.2));
  double mean = 0.0;
  for (double v : draws.Values()) {
    CHECK((v == 0.0 || v == 1.0));
    mean += v;
  }
  mean /= static_cast<double>(draws.size());
  CHECK(std::abs(mean - 0.2) < 0.01);

  CHECK_THROWS_AS(SampleBernoulli(rng, Matrix(1, 1, 1.5)), DomainError);
  CHECK_THROWS_AS(SampleBernoulli(rng, Matrix(1, 1, -0.1)), DomainError);
  CHECK_THROWS_AS(SampleBernoulli(rng, Matrix(1, 1, std::nan(""))), DomainError);
}

TEST_CASE("sample_gaussian") {
  SeededRng rng(2);
  Matrix mean = RandomMatrix(rng, 4, 4);
  CHECK(SampleGaussian(rng, mean, 0.0) == mean);

  Matrix draws = SampleGaussian(rng, Matrix(1000, 100, 0.0), 1.0);
  double sum = 0.0, sq = 0.0;
  for (double v : draws.Values()) {
    sum += v;
    sq += v * v;
  }
  double n = static_cast<double>(draws.size());
  double m = sum / n, var = sq / n - m * m;
  CHECK(std::abs(m) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);

  SeededRng a(77), b(77);
  CHECK(SampleGaussian(a, Matrix(5, 5), 2.0) == SampleGaussian(b, Matrix(5, 5), 2.0));
  CHECK_THROWS_AS(SampleGaussian(rng, mean, -1.0), DomainError);
}

TEST_CASE("shuffle is a deterministic permutation") {
  std::vector<int> items(100);
  for (int i = 0; i < 100; i++) items[i] = i;
  auto a = items, b = items;
  SeededRng r1(4), r2(4);
  Shuffle(std::span<int>(a), r1);
  Shuffle(std::span<int>(b), r2);
  CHECK(a == b);
  CHECK(a != items);
  std::sort(a.begin(), a.end());
  CHECK(a == items);
}
