// src/random.cc

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

#include "pdnn/random.h"

#include <bit>
#include <cmath>
#include <numbers>

#include "pdnn/errors.h"

namespace pdnn {

namespace {

std::uint64_t SplitMix64(std::uint64_t *x) {
  std::uint64_t z = (*x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto &word : state_) word = SplitMix64(&x);
}

std::uint64_t SeededRng::NextU64() {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double SeededRng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double SeededRng::Gaussian() {
  // 1 - u keeps the log argument in (0, 1].
  double u1 = 1.0 - Uniform();
  double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SeededRng::Below(std::uint64_t n) {
  if (n == 0) throw DomainError("SeededRng::Below: empty range");
  // Largest multiple of n representable; draws at or above it are rejected.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

Matrix SampleBernoulli(SeededRng &rng, const Matrix &probs) {
  Matrix out(probs.rows(), probs.cols());
  auto p = probs.Values();
  auto o = out.Values();
  for (std::size_t i = 0; i < p.size(); i++) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw DomainError("SampleBernoulli: probability " + std::to_string(p[i]) +
                        " outside [0, 1]");
    o[i] = rng.Uniform() < p[i] ? 1.0 : 0.0;
  }
  return out;
}

Matrix SampleGaussian(SeededRng &rng, const Matrix &mean, double stddev) {
  if (!(stddev >= 0.0))
    throw DomainError("SampleGaussian: negative stddev " + std::to_string(stddev));
  Matrix out = mean;
  for (double &v : out.Values()) v += stddev * rng.Gaussian();
  return out;
}

}  // namespace pdnn
