// pdnn/synth.h

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

// Synthetic labelled corpus standing in for real acoustic features:
// Gaussian class blobs with unit noise, labels running in per-utterance
// segments of 3 to 10 frames, features standardized per dimension.

#ifndef PDNN_SYNTH_H_
#define PDNN_SYNTH_H_

#include <cstdint>
#include <vector>

#include "pdnn/pfile-io.h"

namespace pdnn {

struct SynthConfig {
  std::uint32_t classes = 3;
  std::uint32_t dim = 10;
  std::uint32_t frames_per_utt = 50;
  std::uint32_t utterances = 100;
  // Class c has mean separation * e_c, so blob centres sit on a scaled
  // simplex; with more classes than dimensions the directions are random
  // unit vectors instead.  Noise is N(0, 1) before standardization.
  double separation = 3.0;
  std::uint64_t seed = 1;       // labels and noise
  std::uint64_t mean_seed = 1;  // random class directions; share it between train and test sets

  // DomainError on zero counts or negative separation.
  void Validate() const;
};

// Deterministic in `config`.  Features are float-representable, so the
// records survive a PFile round trip unchanged.
std::vector<FrameRecord> GenerateSynthetic(const SynthConfig &config);

// The class means before standardization.
std::vector<Vector> SynthClassMeans(const SynthConfig &config);

}  // namespace pdnn

#endif  // PDNN_SYNTH_H_
