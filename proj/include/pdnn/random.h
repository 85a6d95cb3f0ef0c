// pdnn/random.h

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

#ifndef PDNN_RANDOM_H_
#define PDNN_RANDOM_H_

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "pdnn/matrix.h"

namespace pdnn {

// Deterministic generator used for every stochastic step in the toolkit.
//
// The core is xoshiro256** 1.0 (Blackman & Vigna, 2018); the 256-bit state
// is filled from the seed with four successive splitmix64 outputs.  All
// derived draws are defined here in terms of NextU64() only, so a given
// (seed, call sequence) yields the same numbers with any compiler or
// standard library:
//   Uniform()    = (NextU64() >> 11) * 2^-53, in [0, 1)
//   Gaussian()   = Box-Muller on two Uniform() draws, cosine branch only
//   Below(n)     = rejection sampling on NextU64() for an unbiased [0, n)
// A SeededRng has a single owner; it is not thread-safe.
class SeededRng {
 public:
  using State = std::array<std::uint64_t, 4>;

  explicit SeededRng(std::uint64_t seed = 0);

  std::uint64_t NextU64();
  double Uniform();
  double Gaussian();
  std::uint64_t Below(std::uint64_t n);

  // Raw state, for checkpointing.
  const State &state() const { return state_; }
  void set_state(const State &state) { state_ = state; }

  bool operator==(const SeededRng &other) const = default;

 private:
  State state_{};
};

// Each entry is 1 with the corresponding probability; DomainError when a
// probability lies outside [0, 1].
Matrix SampleBernoulli(SeededRng &rng, const Matrix &probs);

// mean + stddev * N(0, 1) elementwise; stddev must be >= 0.
Matrix SampleGaussian(SeededRng &rng, const Matrix &mean, double stddev);

// In-place Fisher-Yates shuffle (Durstenfeld's variant, high index down).
template <typename T>
void Shuffle(std::span<T> items, SeededRng &rng) {
  for (std::size_t i = items.size(); i > 1; i--) {
    std::size_t j = static_cast<std::size_t>(rng.Below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace pdnn

#endif  // PDNN_RANDOM_H_
