// src/pretrain.cc

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


#include "pdnn/pretrain.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdnn/errors.h"

namespace pdnn {

namespace {

void FillUniform(Matrix *m, SeededRng &rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
  for (double &v : m->Values()) v = (2.0 * rng.Uniform() - 1.0) * bound;
}

void CheckBatch(std::size_t cols, std::size_t visible, const char *what) {
  if (cols != visible)
    throw ShapeError(std::string(what) + ": batch has " + std::to_string(cols) +
                     " columns, visible layer has " + std::to_string(visible));
}

double MeanSquaredError(const Matrix &a, const Matrix &b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); i++) {
    double d = a.Values()[i] - b.Values()[i];
    total += d * d;
  }
  return a.size() == 0 ? 0.0 : total / static_cast<double>(a.size());
}

// log(1 + e^x) without overflow.
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void CheckPretrainable(const NetSpec &spec) {
  spec.Validate();
  if (!spec.conv.empty())
    throw DomainError("pre-training covers fully-connected stacks only; got a conv front-end");
  if (spec.maxout_group != 1)
    throw DomainError("pre-training does not support maxout hidden layers");
  if (spec.hidden_activation != ActivationKind::kSigmoid)
    throw DomainError("pre-training needs sigmoid hidden units, got " +
                      std::string(ActivationName(spec.hidden_activation)));
}

Matrix PropagateUp(const std::vector<PretrainedLayer> &lower, Matrix x) {
  for (const auto &l : lower) x = ApplyActivation(ActivationKind::kSigmoid, Affine(x, l.weights, l.bias));
  return x;
}

// Runs `epochs` passes over `data`, feeding each minibatch (already pushed
// through `lower`) to `step`, which returns the batch's per-entry error.
template <typename Step>
std::vector<double> TrainLayer(const std::vector<PretrainedLayer> &lower, PartitionSource &data,
                               const PretrainConfig &config, SeededRng &rng, std::size_t layer,
                               const PretrainObserver &observer, Step step) {
  std::vector<double> errors;
  for (std::size_t epoch = 1; epoch <= config.epochs; epoch++) {
    data.Rewind();
    double total = 0.0;
    std::size_t rows = 0;
    while (auto part = data.Next(rng)) {
      if (part->records.empty()) continue;
      Matrix x = PropagateUp(lower, MakeBatch(part->records).features);
      for (std::size_t b = 0; b < x.rows(); b += config.batch_size) {
        Matrix batch = RowSlice(x, b, std::min(config.batch_size, x.rows() - b));
        total += step(batch) * static_cast<double>(batch.rows());
        rows += batch.rows();
      }
    }
    if (rows == 0) throw DataError("pre-training data contains no frames");
    const double error = total / static_cast<double>(rows);
    if (!std::isfinite(error))
      throw TrainingError("reconstruction error of layer " + std::to_string(layer) +
                          " diverged in epoch " + std::to_string(epoch));
    errors.push_back(error);
    if (observer) observer({layer, epoch, error});
  }
  return errors;
}

}  // namespace

Rbm MakeRbm(RbmKind kind, std::size_t visible_dim, std::size_t hidden_dim, SeededRng &rng) {
  Rbm rbm;
  rbm.kind = kind;
  rbm.weights = Matrix(visible_dim, hidden_dim);
  FillUniform(&rbm.weights, rng);
  rbm.visible_bias.assign(visible_dim, 0.0);
  rbm.hidden_bias.assign(hidden_dim, 0.0);
  return rbm;
}

Matrix HiddenProbs(const Rbm &rbm, const Matrix &visible) {
  CheckBatch(visible.cols(), rbm.visible_dim(), "HiddenProbs");
  return ApplyActivation(ActivationKind::kSigmoid, Affine(visible, rbm.weights, rbm.hidden_bias));
}

Matrix VisibleMean(const Rbm &rbm, const Matrix &hidden) {
  if (hidden.cols() != rbm.hidden_dim())
    throw ShapeError("VisibleMean: got " + std::to_string(hidden.cols()) +
                     " hidden columns, expected " + std::to_string(rbm.hidden_dim()));
  Matrix v = MatMulTransB(hidden, rbm.weights);
  for (std::size_t i = 0; i < v.rows(); i++) AddScaled(1.0, rbm.visible_bias, v.Row(i));
  if (rbm.kind == RbmKind::kBernoulliBernoulli) v = ApplyActivation(ActivationKind::kSigmoid, v);
  return v;
}

double Cd1Update(Rbm *rbm, const Matrix &v0, double lr, SeededRng &rng,
                 Reconstruction reconstruction) {
  CheckBatch(v0.cols(), rbm->visible_dim(), "Cd1Update");
  const Matrix ph0 = HiddenProbs(*rbm, v0);
  const Matrix h0 = SampleBernoulli(rng, ph0);
  Matrix v1 = VisibleMean(*rbm, h0);
  const double error = MeanSquaredError(v0, v1);
  if (rbm->kind == RbmKind::kBernoulliBernoulli && reconstruction == Reconstruction::kSample)
    v1 = SampleBernoulli(rng, v1);
  const Matrix ph1 = HiddenProbs(*rbm, v1);

  const double scale = lr / static_cast<double>(std::max<std::size_t>(v0.rows(), 1));
  Matrix delta = MatMulTransA(v0, ph0);
  AddScaled(-1.0, MatMulTransA(v1, ph1), &delta);
  AddScaled(scale, delta, &rbm->weights);
  Vector dv = ColumnSums(v0), dh = ColumnSums(ph0);
  AddScaled(-1.0, ColumnSums(v1), dv);
  AddScaled(-1.0, ColumnSums(ph1), dh);
  AddScaled(scale, dv, rbm->visible_bias);
  AddScaled(scale, dh, rbm->hidden_bias);
  return error;
}

Matrix CorruptMasking(const Matrix &input, double level, SeededRng &rng) {
  if (!(level >= 0.0 && level <= 1.0))
    throw DomainError("corruption level must lie in [0, 1], got " + std::to_string(level));
  Matrix out = input;
  if (level == 0.0) return out;
  for (double &v : out.Values())
    if (rng.Uniform() < level) v = 0.0;
  return out;
}

DaLayer MakeDaLayer(std::size_t visible_dim, std::size_t hidden_dim, double corruption_level,
                    DecoderKind decoder, SeededRng &rng) {
  if (!(corruption_level >= 0.0 && corruption_level <= 1.0))
    throw DomainError("corruption level must lie in [0, 1], got " +
                      std::to_string(corruption_level));
  DaLayer da;
  da.weights = Matrix(visible_dim, hidden_dim);
  FillUniform(&da.weights, rng);
  da.encode_bias.assign(hidden_dim, 0.0);
  da.decode_bias.assign(visible_dim, 0.0);
  da.corruption_level = corruption_level;
  da.decoder = decoder;
  return da;
}

Matrix DaEncode(const DaLayer &da, const Matrix &input) {
  CheckBatch(input.cols(), da.visible_dim(), "DaEncode");
  return ApplyActivation(ActivationKind::kSigmoid, Affine(input, da.weights, da.encode_bias));
}

namespace {

// Pre-output of the decoder.
Matrix DecodeLinear(const DaLayer &da, const Matrix &code) {
  Matrix a = MatMulTransB(code, da.weights);
  for (std::size_t i = 0; i < a.rows(); i++) AddScaled(1.0, da.decode_bias, a.Row(i));
  return a;
}

Matrix DecodeOutput(const DaLayer &da, const Matrix &pre) {
  return da.decoder == DecoderKind::kSigmoid ? ApplyActivation(ActivationKind::kSigmoid, pre) : pre;
}

double LossFromPre(const DaLayer &da, const Matrix &pre, const Matrix &z, const Matrix &clean) {
  double total = 0.0;
  for (std::size_t i = 0; i < clean.size(); i++) {
    const double x = clean.Values()[i];
    if (da.decoder == DecoderKind::kLinear) {
      const double d = z.Values()[i] - x;
      total += 0.5 * d * d;
    } else {
      const double a = pre.Values()[i];
      total += x * Softplus(-a) + (1.0 - x) * Softplus(a);
    }
  }
  return total / static_cast<double>(std::max<std::size_t>(clean.rows(), 1));
}

}  // namespace

Matrix DaReconstruct(const DaLayer &da, const Matrix &input) {
  return DecodeOutput(da, DecodeLinear(da, DaEncode(da, input)));
}

double DaLoss(const DaLayer &da, const Matrix &corrupted, const Matrix &clean) {
  CheckBatch(clean.cols(), da.visible_dim(), "DaLoss");
  Matrix pre = DecodeLinear(da, DaEncode(da, corrupted));
  return LossFromPre(da, pre, DecodeOutput(da, pre), clean);
}

DaGradients DaBackward(const DaLayer &da, const Matrix &corrupted, const Matrix &clean) {
  CheckBatch(clean.cols(), da.visible_dim(), "DaBackward");
  if (corrupted.rows() != clean.rows() || corrupted.cols() != clean.cols())
    throw ShapeError("DaBackward: corrupted batch is " + corrupted.ShapeString() +
                     ", clean batch is " + clean.ShapeString());
  const Matrix y = DaEncode(da, corrupted);
  const Matrix pre = DecodeLinear(da, y);
  const Matrix z = DecodeOutput(da, pre);

  DaGradients g;
  g.loss = LossFromPre(da, pre, z, clean);
  g.mean_squared_error = MeanSquaredError(z, clean);

  // Both losses give d/d(pre) = (z - x) / n.
  Matrix d_out = z;
  AddScaled(-1.0, clean, &d_out);
  d_out = Scaled(d_out, 1.0 / static_cast<double>(std::max<std::size_t>(clean.rows(), 1)));
  Matrix d_code = Hadamard(MatMul(d_out, da.weights),
                           ActivationDerivFromOutput(ActivationKind::kSigmoid, y));
  g.weights = MatMulTransA(d_out, y);
  AddScaled(1.0, MatMulTransA(corrupted, d_code), &g.weights);
  g.encode_bias = ColumnSums(d_code);
  g.decode_bias = ColumnSums(d_out);
  return g;
}

double DaUpdate(DaLayer *da, const Matrix &batch, double lr, SeededRng &rng) {
  const Matrix corrupted = CorruptMasking(batch, da->corruption_level, rng);
  DaGradients g = DaBackward(*da, corrupted, batch);
  AddScaled(-lr, g.weights, &da->weights);
  AddScaled(-lr, g.encode_bias, da->encode_bias);
  AddScaled(-lr, g.decode_bias, da->decode_bias);
  return g.mean_squared_error;
}

void PretrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || !(gaussian_learning_rate > 0.0))
    throw DomainError("pre-training learning rates must be positive");
  if (batch_size == 0) throw DomainError("pre-training batch size must be positive");
  if (!(corruption_level >= 0.0 && corruption_level <= 1.0))
    throw DomainError("corruption level must lie in [0, 1], got " +
                      std::to_string(corruption_level));
}

std::vector<RbmKind> StackRbmKinds(std::size_t num_hidden) {
  std::vector<RbmKind> kinds(num_hidden, RbmKind::kBernoulliBernoulli);
  if (num_hidden > 0) kinds[0] = RbmKind::kGaussianBernoulli;
  return kinds;
}

PretrainedStack PretrainRbmStack(const NetSpec &spec, PartitionSource &data,
                                 const PretrainConfig &config, SeededRng &rng,
                                 const PretrainObserver &observer) {
  CheckPretrainable(spec);
  config.Validate();
  if (spec.num_hidden() > 0 && data.feature_dim() != spec.input_dim())
    throw DataError("pre-training data has dimension " + std::to_string(data.feature_dim()) +
                    ", network input is " + std::to_string(spec.input_dim()));
  PretrainedStack stack;
  stack.method = PretrainMethod::kRbm;
  const auto kinds = StackRbmKinds(spec.num_hidden());
  for (std::size_t k = 0; k < kinds.size(); k++) {
    Rbm rbm = MakeRbm(kinds[k], spec.layer_sizes[k], spec.layer_sizes[k + 1], rng);
    const double lr = kinds[k] == RbmKind::kGaussianBernoulli ? config.gaussian_learning_rate
                                                              : config.learning_rate;
    stack.recon_errors.push_back(
        TrainLayer(stack.layers, data, config, rng, k, observer, [&](const Matrix &batch) {
          return Cd1Update(&rbm, batch, lr, rng, config.reconstruction);
        }));
    stack.layers.push_back({std::move(rbm.weights), std::move(rbm.hidden_bias)});
  }
  return stack;
}

PretrainedStack PretrainSdaStack(const NetSpec &spec, PartitionSource &data,
                                 const PretrainConfig &config, SeededRng &rng,
                                 const PretrainObserver &observer) {
  CheckPretrainable(spec);
  config.Validate();
  if (spec.num_hidden() > 0 && data.feature_dim() != spec.input_dim())
    throw DataError("pre-training data has dimension " + std::to_string(data.feature_dim()) +
                    ", network input is " + std::to_string(spec.input_dim()));
  PretrainedStack stack;
  stack.method = PretrainMethod::kSda;
  for (std::size_t k = 0; k < spec.num_hidden(); k++) {
    DaLayer da = MakeDaLayer(spec.layer_sizes[k], spec.layer_sizes[k + 1], config.corruption_level,
                             k == 0 ? DecoderKind::kLinear : DecoderKind::kSigmoid, rng);
    stack.recon_errors.push_back(
        TrainLayer(stack.layers, data, config, rng, k, observer, [&](const Matrix &batch) {
          return DaUpdate(&da, batch, config.learning_rate, rng);
        }));
    stack.layers.push_back({std::move(da.weights), std::move(da.encode_bias)});
  }
  return stack;
}

void FoldStandardization(const FeatureStats &stats, PretrainedStack *stack) {
  if (stack->layers.empty()) return;
  Matrix &w = stack->layers[0].weights;
  Vector &b = stack->layers[0].bias;
  if (stats.mean.size() != w.rows() || stats.inv_std.size() != w.rows())
    throw ShapeError("feature statistics of dimension " + std::to_string(stats.mean.size()) +
                     " for a first layer with " + std::to_string(w.rows()) + " inputs");
  for (std::size_t k = 0; k < w.rows(); k++)
    for (std::size_t j = 0; j < w.cols(); j++) {
      w(k, j) *= stats.inv_std[k];
      b[j] -= stats.mean[k] * w(k, j);
    }
}

void ApplyPretrainedStack(const PretrainedStack &stack, Network *net) {
  std::size_t next = 0;
  for (std::size_t i = 0; i < net->layers().size() && next < stack.layers.size(); i++) {
    if (!std::holds_alternative<DenseLayer>(net->layers()[i])) continue;
    const PretrainedLayer &src = stack.layers[next];
    auto &dense = std::get<DenseLayer>(net->mutable_layer(i));
    if (dense.weights.rows() != src.weights.rows() || dense.weights.cols() != src.weights.cols() ||
        dense.bias.size() != src.bias.size())
      throw ShapeError("pre-trained layer " + std::to_string(next) + " is " +
                       src.weights.ShapeString() + ", network layer " + std::to_string(i) +
                       " is " + dense.weights.ShapeString());
    dense.weights = src.weights;
    dense.bias = src.bias;
    next++;
  }
  if (next != stack.layers.size())
    throw ShapeError("pre-trained stack has " + std::to_string(stack.layers.size()) +
                     " layers, network has only " + std::to_string(next) + " hidden layers");
}

}  // namespace pdnn
