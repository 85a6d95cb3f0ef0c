// src/synth.cc

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


#include "pdnn/synth.h"

#include <cmath>
#include <string>

#include "pdnn/errors.h"
#include "pdnn/random.h"

namespace pdnn {

void SynthConfig::Validate() const {
  if (classes == 0 || dim == 0 || frames_per_utt == 0 || utterances == 0)
    throw DomainError("synthetic corpus counts must be positive");
  if (!(separation >= 0.0))
    throw DomainError("blob separation must be non-negative, got " + std::to_string(separation));
}

namespace {

std::vector<Vector> ClassMeans(const SynthConfig &config, SeededRng &rng) {
  std::vector<Vector> means(config.classes, Vector(config.dim, 0.0));
  for (std::uint32_t c = 0; c < config.classes; c++) {
    if (config.classes <= config.dim) {
      means[c][c] = config.separation;
      continue;
    }
    double norm = 0.0;
    while (norm == 0.0) {
      for (double &v : means[c]) v = rng.Gaussian();
      norm = 0.0;
      for (double v : means[c]) norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double &v : means[c]) v *= config.separation / norm;
  }
  return means;
}

}  // namespace

std::vector<Vector> SynthClassMeans(const SynthConfig &config) {
  config.Validate();
  SeededRng rng(config.mean_seed);
  return ClassMeans(config, rng);
}

std::vector<FrameRecord> GenerateSynthetic(const SynthConfig &config) {
  config.Validate();
  const auto means = SynthClassMeans(config);
  SeededRng rng(config.seed);

  std::vector<FrameRecord> records;
  records.reserve(static_cast<std::size_t>(config.utterances) * config.frames_per_utt);
  for (std::uint32_t u = 0; u < config.utterances; u++) {
    std::uint32_t label = 0;
    std::uint32_t left = 0;
    for (std::uint32_t t = 0; t < config.frames_per_utt; t++) {
      if (left == 0) {
        label = static_cast<std::uint32_t>(rng.Below(config.classes));
        left = 3 + static_cast<std::uint32_t>(rng.Below(8));
      }
      left--;
      FrameRecord r;
      r.utt_index = u;
      r.frame_index = t;
      r.label = label;
      r.features.resize(config.dim);
      for (std::uint32_t k = 0; k < config.dim; k++) r.features[k] = means[label][k] + rng.Gaussian();
      records.push_back(std::move(r));
    }
  }

  Vector mean(config.dim, 0.0), sq(config.dim, 0.0);
  for (const auto &r : records)
    for (std::uint32_t k = 0; k < config.dim; k++) {
      mean[k] += r.features[k];
      sq[k] += r.features[k] * r.features[k];
    }
  const double n = static_cast<double>(records.size());
  for (std::uint32_t k = 0; k < config.dim; k++) {
    mean[k] /= n;
    double var = sq[k] / n - mean[k] * mean[k];
    sq[k] = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
  }
  for (auto &r : records)
    for (std::uint32_t k = 0; k < config.dim; k++)
      r.features[k] = static_cast<float>((r.features[k] - mean[k]) * sq[k]);
  return records;
}

}  // namespace pdnn
