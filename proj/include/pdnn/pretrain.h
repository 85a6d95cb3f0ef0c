// pdnn/pretrain.h

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

// Greedy layer-wise pre-training of the fully-connected hidden layers of a
// network, either as a stack of RBMs trained with CD-1 or as a stack of
// denoising autoencoders with tied weights.

#ifndef PDNN_PRETRAIN_H_
#define PDNN_PRETRAIN_H_

#include <cstddef>
#include <functional>
#include <vector>

#include "pdnn/matrix.h"
#include "pdnn/network.h"
#include "pdnn/pfile-io.h"
#include "pdnn/random.h"

namespace pdnn {

enum class RbmKind { kGaussianBernoulli, kBernoulliBernoulli };

// Gaussian-Bernoulli visibles are assumed standardized (unit variance), so
// their conditional mean is the plain affine map h W^T + visible_bias.
struct Rbm {
  RbmKind kind = RbmKind::kBernoulliBernoulli;
  Matrix weights;  // visible x hidden
  Vector visible_bias;
  Vector hidden_bias;

  std::size_t visible_dim() const { return weights.rows(); }
  std::size_t hidden_dim() const { return weights.cols(); }
};

Rbm MakeRbm(RbmKind kind, std::size_t visible_dim, std::size_t hidden_dim, SeededRng &rng);

Matrix HiddenProbs(const Rbm &rbm, const Matrix &visible);
Matrix VisibleMean(const Rbm &rbm, const Matrix &hidden);

// How the negative phase reconstructs the visible layer of a
// Bernoulli-Bernoulli RBM.  kMean uses p(v|h0) itself, which matches inputs
// that are probabilities (the hidden activations of a lower layer); kSample
// draws binary units from it.  Gaussian visibles always use the mean.
enum class Reconstruction { kMean, kSample };

// One CD-1 step on `batch`: h0 ~ p(h|v0), v1 reconstructed from h0 as set
// by `reconstruction`, statistics from p(h|v0) and p(h|v1).  Returns the
// mean squared error between v0 and VisibleMean(h0), computed before the
// update.
double Cd1Update(Rbm *rbm, const Matrix &batch, double lr, SeededRng &rng,
                 Reconstruction reconstruction = Reconstruction::kMean);

// Masking noise: each entry independently zeroed with probability `level`.
Matrix CorruptMasking(const Matrix &input, double level, SeededRng &rng);

enum class DecoderKind {
  kLinear,   // real-valued inputs, squared-error loss
  kSigmoid,  // inputs in [0, 1], cross-entropy loss
};

// Denoising autoencoder with tied weights: encode sigmoid(x W + b),
// decode y W^T + c (then sigmoid for kSigmoid).
struct DaLayer {
  Matrix weights;  // visible x hidden
  Vector encode_bias;
  Vector decode_bias;
  double corruption_level = 0.0;
  DecoderKind decoder = DecoderKind::kLinear;

  std::size_t visible_dim() const { return weights.rows(); }
  std::size_t hidden_dim() const { return weights.cols(); }
  Matrix DecodeWeights() const { return Transpose(weights); }
};

DaLayer MakeDaLayer(std::size_t visible_dim, std::size_t hidden_dim, double corruption_level,
                    DecoderKind decoder, SeededRng &rng);

Matrix DaEncode(const DaLayer &da, const Matrix &input);
Matrix DaReconstruct(const DaLayer &da, const Matrix &input);

// Mean over rows of the reconstruction loss of `clean` from `corrupted`:
// 0.5 * squared error for kLinear, cross-entropy for kSigmoid.
double DaLoss(const DaLayer &da, const Matrix &corrupted, const Matrix &clean);

struct DaGradients {
  Matrix weights;
  Vector encode_bias;
  Vector decode_bias;
  double loss = 0.0;
  double mean_squared_error = 0.0;  // per entry, reconstruction vs clean
};
DaGradients DaBackward(const DaLayer &da, const Matrix &corrupted, const Matrix &clean);

// Corrupts `batch`, takes one SGD step on DaLoss and returns the mean
// squared reconstruction error per entry, measured before the step.
double DaUpdate(DaLayer *da, const Matrix &batch, double lr, SeededRng &rng);

struct PretrainConfig {
  std::size_t epochs = 10;
  double learning_rate = 0.08;
  double gaussian_learning_rate = 0.005;  // first (Gaussian-Bernoulli) RBM only
  std::size_t batch_size = 128;
  double corruption_level = 0.2;          // SdA only
  Reconstruction reconstruction = Reconstruction::kMean;  // RBM only

  // DomainError on non-positive rates or batch size, corruption outside [0, 1].
  void Validate() const;
};

enum class PretrainMethod { kRbm, kSda };

struct PretrainedLayer {
  Matrix weights;  // input x hidden
  Vector bias;
  bool operator==(const PretrainedLayer &) const = default;
};

struct PretrainedStack {
  PretrainMethod method = PretrainMethod::kRbm;
  std::vector<PretrainedLayer> layers;
  // recon_errors[k][e]: mean squared reconstruction error of layer k over epoch e.
  std::vector<std::vector<double>> recon_errors;
};

struct PretrainEpoch {
  std::size_t layer = 0;
  std::size_t epoch = 0;  // 1-based
  double recon_error = 0.0;
};
using PretrainObserver = std::function<void(const PretrainEpoch &)>;

// The kind of RBM used for each hidden layer of a stack.
std::vector<RbmKind> StackRbmKinds(std::size_t num_hidden);

// Trains one RBM per hidden layer of `spec`, bottom up.  Layer k sees the
// hidden probabilities of the already trained layers below it.  Only plain
// sigmoid fully-connected specs can be pre-trained; DomainError otherwise.
PretrainedStack PretrainRbmStack(const NetSpec &spec, PartitionSource &data,
                                 const PretrainConfig &config, SeededRng &rng,
                                 const PretrainObserver &observer = {});

// As above with denoising autoencoders; the first layer decodes linearly,
// the others through a sigmoid.
PretrainedStack PretrainSdaStack(const NetSpec &spec, PartitionSource &data,
                                 const PretrainConfig &config, SeededRng &rng,
                                 const PretrainObserver &observer = {});

// Rewrites the first layer so the stack consumes raw features that it was
// trained to see standardized with `stats`:
//   W'[k][j] = W[k][j] * inv_std[k],  b'[j] = b[j] - sum_k mean[k] * W'[k][j].
void FoldStandardization(const FeatureStats &stats, PretrainedStack *stack);

// Copies the stack into the leading dense layers of `net`.  ShapeError when
// a layer does not match or the stack is deeper than the hidden stack.
void ApplyPretrainedStack(const PretrainedStack &stack, Network *net);

}  // namespace pdnn

#endif  // PDNN_PRETRAIN_H_
