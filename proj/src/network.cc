// src/network.cc

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

#include "pdnn/network.h"

#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>

#include "pdnn/errors.h"

namespace pdnn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::atomic<std::uint64_t> g_generation{0};

std::string Str(std::size_t v) { return std::to_string(v); }

// Row (i * conv_len + t), column (m * width + k) holds in[i][m][t + k].
Matrix Im2Col(const ConvLayerSpec &s, const Matrix &input) {
  const std::size_t n = input.rows(), len = s.conv_len(), width = s.filter_width;
  Matrix cols(n * len, s.input_maps * width);
  for (std::size_t i = 0; i < n; i++) {
    auto x = input.Row(i);
    for (std::size_t t = 0; t < len; t++) {
      auto row = cols.Row(i * len + t);
      for (std::size_t m = 0; m < s.input_maps; m++)
        for (std::size_t k = 0; k < width; k++)
          row[m * width + k] = x[m * s.input_band_len + t + k];
    }
  }
  return cols;
}

void FillUniform(std::span<double> values, double bound, SeededRng &rng) {
  for (double &v : values) v = (2.0 * rng.Uniform() - 1.0) * bound;
}

void CheckLayer(const Layer &layer, std::size_t index) {
  std::visit(Overloaded{
                 [&](const ConvLayer &c) {
                   c.spec.Validate();
                   if (c.filters.rows() != c.spec.num_filters ||
                       c.filters.cols() != c.spec.input_maps * c.spec.filter_width ||
                       c.bias.size() != c.spec.num_filters)
                     throw ShapeError("conv layer " + Str(index) + ": parameter shapes " +
                                      c.filters.ShapeString() + " do not match its spec");
                 },
                 [&](const DenseLayer &d) {
                   if (d.maxout_group == 0 || d.linear_dim() % d.maxout_group != 0)
                     throw ShapeError("dense layer " + Str(index) + ": width " +
                                      Str(d.linear_dim()) + " not divisible by maxout group " +
                                      Str(d.maxout_group));
                   if (d.bias.size() != d.linear_dim())
                     throw ShapeError("dense layer " + Str(index) + ": bias length mismatch");
                   if (!(d.dropout_factor >= 0.0 && d.dropout_factor < 1.0))
                     throw DomainError("dense layer " + Str(index) + ": dropout factor outside [0, 1)");
                 },
                 [&](const SoftmaxLayer &s) {
                   if (s.bias.size() != s.weights.cols())
                     throw ShapeError("softmax layer " + Str(index) + ": bias length mismatch");
                 },
             },
             layer);
}

}  // namespace

std::size_t NetSpec::BottleneckLayer() const {
  if (!bottleneck_index) throw DomainError("network has no bottleneck layer");
  return conv.num_filters.size() + *bottleneck_index - 1;
}

void NetSpec::Validate() const {
  if (layer_sizes.size() < 2)
    throw ShapeError("network needs at least input and output sizes");
  for (std::size_t s : layer_sizes)
    if (s == 0) throw ShapeError("layer sizes must be positive");
  if (maxout_group == 0) throw DomainError("maxout group must be >= 1");
  if (!(dropout_factor >= 0.0 && dropout_factor < 1.0))
    throw DomainError("dropout factor must lie in [0, 1)");
  if (bottleneck_index &&
      (*bottleneck_index == 0 || *bottleneck_index + 1 >= layer_sizes.size()))
    throw DomainError("bottleneck index " + Str(*bottleneck_index) +
                      " does not name a hidden layer");
  if (!conv.empty()) {
    if (conv.input_maps == 0 || input_dim() % conv.input_maps != 0)
      throw ShapeError("input dimension " + Str(input_dim()) + " cannot be split into " +
                       Str(conv.input_maps) + " feature maps");
    std::size_t maps = conv.input_maps, band = input_dim() / conv.input_maps;
    for (std::size_t filters : conv.num_filters) {
      ConvLayerSpec s{maps, band, filters, conv.filter_width, conv.pool_size, hidden_activation};
      s.Validate();
      maps = filters;
      band = s.pooled_len();
    }
  }
}

NetSpec ParseNetSpec(std::string_view text, const NetSpec &options) {
  NetSpec spec = options;
  spec.layer_sizes.clear();
  std::size_t position = 0, start = 0;
  while (true) {
    std::size_t end = text.find(':', start);
    std::string_view token =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
      throw ParseError("nnet spec: token " + Str(position) + " ('" + std::string(token) +
                           "') is not a positive integer",
                       position);
    if (value == 0)
      throw ParseError("nnet spec: token " + Str(position) + " is zero", position);
    spec.layer_sizes.push_back(value);
    position++;
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (spec.layer_sizes.size() < 2)
    throw ParseError("nnet spec needs at least 2 entries", position);
  return spec;
}

std::string FormatLayerSizes(std::span<const std::size_t> sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); i++) {
    if (i) out += ':';
    out += Str(sizes[i]);
  }
  return out;
}

void ConvLayerSpec::Validate() const {
  if (input_maps == 0 || num_filters == 0 || filter_width == 0 || pool_size == 0)
    throw ShapeError("conv layer: maps, filters, width and pool size must be positive");
  if (filter_width > input_band_len)
    throw ShapeError("conv layer: filter width " + Str(filter_width) +
                     " exceeds band length " + Str(input_band_len));
  if (conv_len() % pool_size != 0)
    throw ShapeError("conv layer: conv output length " + Str(conv_len()) +
                     " (band " + Str(input_band_len) + " - width " + Str(filter_width) +
                     " + 1) not divisible by pool size " + Str(pool_size));
}

std::size_t LayerInputDim(const Layer &layer) {
  return std::visit(Overloaded{
                        [](const ConvLayer &c) { return c.spec.input_dim(); },
                        [](const DenseLayer &d) { return d.input_dim(); },
                        [](const SoftmaxLayer &s) { return s.weights.rows(); },
                    },
                    layer);
}

std::size_t LayerOutputDim(const Layer &layer) {
  return std::visit(Overloaded{
                        [](const ConvLayer &c) { return c.spec.output_dim(); },
                        [](const DenseLayer &d) { return d.output_dim(); },
                        [](const SoftmaxLayer &s) { return s.weights.cols(); },
                    },
                    layer);
}

Network::Network(std::size_t input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  std::size_t dim = input_dim_;
  for (std::size_t i = 0; i < layers_.size(); i++) {
    CheckLayer(layers_[i], i);
    if (LayerInputDim(layers_[i]) != dim)
      throw ShapeError("layer " + Str(i) + " expects " + Str(LayerInputDim(layers_[i])) +
                       " inputs but receives " + Str(dim));
    if (std::holds_alternative<SoftmaxLayer>(layers_[i]) && i + 1 != layers_.size())
      throw ShapeError("softmax layer " + Str(i) + " is not the last layer");
    dim = LayerOutputDim(layers_[i]);
  }
  Touch();
}

std::size_t Network::output_dim() const {
  return layers_.empty() ? input_dim_ : LayerOutputDim(layers_.back());
}

bool Network::has_softmax() const {
  return !layers_.empty() && std::holds_alternative<SoftmaxLayer>(layers_.back());
}

Layer &Network::mutable_layer(std::size_t i) {
  Touch();
  return layers_.at(i);
}

void Network::Touch() { generation_ = ++g_generation; }

std::vector<std::span<double>> Network::ParameterBlocks() {
  Touch();
  std::vector<std::span<double>> blocks;
  for (auto &layer : layers_) {
    std::visit(Overloaded{
                   [&](ConvLayer &c) {
                     blocks.push_back(c.filters.Values());
                     blocks.push_back(c.bias);
                   },
                   [&](auto &l) {
                     blocks.push_back(l.weights.Values());
                     blocks.push_back(l.bias);
                   },
               },
               layer);
  }
  return blocks;
}

std::vector<std::span<const double>> Network::ParameterBlocks() const {
  std::vector<std::span<const double>> blocks;
  for (const auto &layer : layers_) {
    std::visit(Overloaded{
                   [&](const ConvLayer &c) {
                     blocks.push_back(c.filters.Values());
                     blocks.push_back(c.bias);
                   },
                   [&](const auto &l) {
                     blocks.push_back(l.weights.Values());
                     blocks.push_back(l.bias);
                   },
               },
               layer);
  }
  return blocks;
}

std::size_t Network::NumParameters() const {
  std::size_t n = 0;
  for (auto block : ParameterBlocks()) n += block.size();
  return n;
}

Network BuildNetwork(const NetSpec &spec) {
  spec.Validate();
  std::vector<Layer> layers;
  std::size_t dim = spec.input_dim();
  if (!spec.conv.empty()) {
    std::size_t maps = spec.conv.input_maps, band = dim / maps;
    for (std::size_t filters : spec.conv.num_filters) {
      ConvLayer c;
      c.spec = {maps, band, filters, spec.conv.filter_width, spec.conv.pool_size,
                spec.hidden_activation};
      c.filters = Matrix(filters, maps * spec.conv.filter_width);
      c.bias.assign(filters, 0.0);
      maps = filters;
      band = c.spec.pooled_len();
      dim = c.spec.output_dim();
      layers.push_back(std::move(c));
    }
  }
  for (std::size_t k = 1; k + 1 < spec.layer_sizes.size(); k++) {
    DenseLayer d;
    const std::size_t linear = spec.layer_sizes[k] * spec.maxout_group;
    d.weights = Matrix(dim, linear);
    d.bias.assign(linear, 0.0);
    d.activation = spec.hidden_activation;
    d.maxout_group = spec.maxout_group;
    d.dropout_factor = spec.dropout_factor;
    dim = spec.layer_sizes[k];
    layers.push_back(std::move(d));
  }
  SoftmaxLayer out;
  out.weights = Matrix(dim, spec.num_targets());
  out.bias.assign(spec.num_targets(), 0.0);
  layers.push_back(std::move(out));
  return Network(spec.input_dim(), std::move(layers));
}

Network InitNetwork(const NetSpec &spec, SeededRng &rng) {
  Network net = BuildNetwork(spec);
  for (std::size_t i = 0; i < net.layers().size(); i++) {
    std::visit(Overloaded{
                   [&](ConvLayer &c) {
                     const double fan_in = double(c.spec.input_maps * c.spec.filter_width);
                     const double fan_out = double(c.spec.num_filters * c.spec.filter_width);
                     FillUniform(c.filters.Values(), std::sqrt(6.0 / (fan_in + fan_out)), rng);
                   },
                   [&](auto &l) {
                     const double fan = double(l.weights.rows() + l.weights.cols());
                     FillUniform(l.weights.Values(), std::sqrt(6.0 / fan), rng);
                   },
               },
               net.mutable_layer(i));
  }
  return net;
}

std::pair<Matrix, std::vector<std::uint32_t>> MaxoutPool(const Matrix &linear,
                                                        std::size_t group) {
  if (group == 0 || linear.cols() % group != 0)
    throw ShapeError("maxout: width " + Str(linear.cols()) + " not divisible by group " +
                     Str(group));
  const std::size_t out_dim = linear.cols() / group;
  Matrix out(linear.rows(), out_dim);
  std::vector<std::uint32_t> argmax(linear.rows() * out_dim);
  for (std::size_t i = 0; i < linear.rows(); i++) {
    auto row = linear.Row(i);
    for (std::size_t j = 0; j < out_dim; j++) {
      std::size_t best = j * group;
      for (std::size_t c = best + 1; c < (j + 1) * group; c++)
        if (row[c] > row[best]) best = c;
      out(i, j) = row[best];
      argmax[i * out_dim + j] = static_cast<std::uint32_t>(best);
    }
  }
  return {std::move(out), std::move(argmax)};
}

Matrix ConvForward(const ConvLayer &layer, const Matrix &input, LayerCache *cache) {
  const ConvLayerSpec &s = layer.spec;
  if (input.cols() != s.input_dim())
    throw ShapeError("conv layer expects " + Str(s.input_maps) + " maps x " +
                     Str(s.input_band_len) + " bands = " + Str(s.input_dim()) +
                     " inputs, got " + Str(input.cols()));
  const std::size_t n = input.rows(), len = s.conv_len(), pooled = s.pooled_len();
  const std::size_t filters = s.num_filters;
  Matrix z = MatMulTransB(Im2Col(s, input), layer.filters);  // (n * len) x filters
  Matrix maps(n, filters * len);
  for (std::size_t i = 0; i < n; i++)
    for (std::size_t t = 0; t < len; t++)
      for (std::size_t f = 0; f < filters; f++)
        maps(i, f * len + t) = Activate(s.activation, z(i * len + t, f) + layer.bias[f]);

  Matrix out(n, filters * pooled);
  std::vector<std::uint32_t> argmax(n * filters * pooled);
  for (std::size_t i = 0; i < n; i++) {
    auto row = maps.Row(i);
    for (std::size_t f = 0; f < filters; f++) {
      for (std::size_t p = 0; p < pooled; p++) {
        std::size_t best = f * len + p * s.pool_size;
        for (std::size_t c = best + 1; c < f * len + (p + 1) * s.pool_size; c++)
          if (row[c] > row[best]) best = c;
        out(i, f * pooled + p) = row[best];
        argmax[i * filters * pooled + f * pooled + p] = static_cast<std::uint32_t>(best);
      }
    }
  }
  if (cache) {
    cache->linear = std::move(maps);
    cache->argmax = std::move(argmax);
  }
  return out;
}

ForwardPass Forward(const Network &net, const Matrix &batch, Mode mode, SeededRng &rng) {
  if (batch.cols() != net.input_dim())
    throw ShapeError("network expects " + Str(net.input_dim()) + " input columns, batch is " +
                     batch.ShapeString());
  ForwardPass pass;
  pass.mode = mode;
  pass.generation = net.generation();
  pass.activations.reserve(net.layers().size() + 1);
  pass.caches.resize(net.layers().size());
  pass.activations.push_back(batch);
  for (std::size_t li = 0; li < net.layers().size(); li++) {
    const Matrix &x = pass.activations.back();
    LayerCache &cache = pass.caches[li];
    Matrix out = std::visit(
        Overloaded{
            [&](const ConvLayer &c) { return ConvForward(c, x, &cache); },
            [&](const DenseLayer &d) {
              cache.linear = Affine(x, d.weights, d.bias);
              Matrix y;
              if (d.maxout_group > 1) {
                auto [pooled, argmax] = MaxoutPool(cache.linear, d.maxout_group);
                y = std::move(pooled);
                cache.argmax = std::move(argmax);
              } else {
                y = ApplyActivation(d.activation, cache.linear);
              }
              if (d.dropout_factor > 0.0) {
                if (mode == Mode::kTrain) {
                  cache.mask = SampleBernoulli(
                      rng, Matrix(y.rows(), y.cols(), 1.0 - d.dropout_factor));
                  return Hadamard(y, cache.mask);
                }
                return Scaled(y, 1.0 - d.dropout_factor);
              }
              return y;
            },
            [&](const SoftmaxLayer &s) {
              cache.linear = Affine(x, s.weights, s.bias);
              return SoftmaxRows(cache.linear);
            },
        },
        net.layers()[li]);
    pass.activations.push_back(std::move(out));
  }
  return pass;
}

Matrix Infer(const Network &net, const Matrix &batch) {
  SeededRng unused(0);
  ForwardPass pass = Forward(net, batch, Mode::kInfer, unused);
  return std::move(pass.activations.back());
}

std::vector<std::span<const double>> Gradients::Blocks() const {
  std::vector<std::span<const double>> blocks;
  for (const auto &g : layers) {
    blocks.push_back(g.weights.Values());
    blocks.push_back(g.bias);
  }
  return blocks;
}

namespace {

// Gradient w.r.t. the layer input given d_out w.r.t. its pooled output.
Matrix ConvBackward(const ConvLayer &layer, const Matrix &input, const LayerCache &cache,
                    const Matrix &d_out, LayerGradient *grad, bool need_input_grad) {
  const ConvLayerSpec &s = layer.spec;
  const std::size_t n = input.rows(), len = s.conv_len(), filters = s.num_filters;
  Matrix d_maps(n, filters * len);
  const std::size_t pooled_cols = d_out.cols();
  for (std::size_t i = 0; i < n; i++)
    for (std::size_t j = 0; j < pooled_cols; j++)
      d_maps(i, cache.argmax[i * pooled_cols + j]) += d_out(i, j);
  Matrix deriv = ActivationDerivFromOutput(s.activation, cache.linear);

  Matrix dz(n * len, filters);
  for (std::size_t i = 0; i < n; i++)
    for (std::size_t f = 0; f < filters; f++)
      for (std::size_t t = 0; t < len; t++)
        dz(i * len + t, f) = d_maps(i, f * len + t) * deriv(i, f * len + t);

  Matrix cols = Im2Col(s, input);
  grad->weights = MatMulTransA(dz, cols);
  grad->bias = ColumnSums(dz);
  if (!need_input_grad) return {};

  Matrix d_cols = MatMul(dz, layer.filters);
  Matrix d_input(n, s.input_dim());
  for (std::size_t i = 0; i < n; i++)
    for (std::size_t t = 0; t < len; t++) {
      auto row = d_cols.Row(i * len + t);
      for (std::size_t m = 0; m < s.input_maps; m++)
        for (std::size_t k = 0; k < s.filter_width; k++)
          d_input(i, m * s.input_band_len + t + k) += row[m * s.filter_width + k];
    }
  return d_input;
}

}  // namespace

Gradients Backward(const Network &net, const ForwardPass &pass, const Matrix &targets) {
  if (pass.mode != Mode::kTrain)
    throw ContractError("Backward needs a train-mode forward pass");
  if (pass.generation != net.generation() ||
      pass.activations.size() != net.layers().size() + 1)
    throw ContractError("Backward: forward pass is stale (parameters changed since Forward)");
  if (!net.has_softmax()) throw ContractError("Backward needs a network ending in softmax");
  const Matrix &posteriors = pass.output();
  if (targets.rows() != posteriors.rows() || targets.cols() != posteriors.cols())
    throw ShapeError("targets " + targets.ShapeString() + " do not match posteriors " +
                     posteriors.ShapeString());
  const std::size_t n = posteriors.rows();
  if (n == 0) throw DomainError("Backward on an empty batch");

  Gradients grads;
  grads.layers.resize(net.layers().size());
  grads.loss = MeanCrossEntropy(posteriors, targets);

  // Gradient of the loss w.r.t. the softmax input.
  Matrix delta = posteriors;
  AddScaled(-1.0, targets, &delta);
  for (double &v : delta.Values()) v /= static_cast<double>(n);

  for (std::size_t li = net.layers().size(); li-- > 0;) {
    const Matrix &x = pass.activations[li];
    const LayerCache &cache = pass.caches[li];
    LayerGradient &g = grads.layers[li];
    const bool need_input_grad = li > 0;
    delta = std::visit(
        Overloaded{
            [&](const ConvLayer &c) {
              return ConvBackward(c, x, cache, delta, &g, need_input_grad);
            },
            [&](const DenseLayer &d) {
              Matrix d_y = cache.mask.empty() ? std::move(delta) : Hadamard(delta, cache.mask);
              Matrix d_z;
              if (d.maxout_group > 1) {
                d_z = Matrix(n, d.linear_dim());
                const std::size_t out_dim = d.output_dim();
                for (std::size_t i = 0; i < n; i++)
                  for (std::size_t j = 0; j < out_dim; j++)
                    d_z(i, cache.argmax[i * out_dim + j]) += d_y(i, j);
              } else {
                Matrix y = ApplyActivation(d.activation, cache.linear);
                d_z = Hadamard(d_y, ActivationDerivFromOutput(d.activation, y));
              }
              g.weights = MatMulTransA(x, d_z);
              g.bias = ColumnSums(d_z);
              return need_input_grad ? MatMulTransB(d_z, d.weights) : Matrix();
            },
            [&](const SoftmaxLayer &s) {
              g.weights = MatMulTransA(x, delta);
              g.bias = ColumnSums(delta);
              return need_input_grad ? MatMulTransB(delta, s.weights) : Matrix();
            },
        },
        net.layers()[li]);
  }
  return grads;
}

Gradients Backward(const Network &net, const ForwardPass &pass,
                   std::span<const std::uint32_t> labels) {
  return Backward(net, pass, OneHot(labels, net.output_dim()));
}

Matrix OneHot(std::span<const std::uint32_t> labels, std::size_t num_classes) {
  Matrix m(labels.size(), num_classes);
  for (std::size_t i = 0; i < labels.size(); i++) {
    if (labels[i] >= num_classes)
      throw DataError("label " + Str(labels[i]) + " at row " + Str(i) + " outside [0, " +
                      Str(num_classes) + ")");
    m(i, labels[i]) = 1.0;
  }
  return m;
}

double MeanCrossEntropy(const Matrix &posteriors, const Matrix &targets) {
  if (posteriors.rows() == 0) return 0.0;
  double total = 0.0;
  auto p = posteriors.Values();
  auto t = targets.Values();
  for (std::size_t i = 0; i < p.size(); i++)
    if (t[i] != 0.0)
      total -= t[i] * std::log(std::max(p[i], std::numeric_limits<double>::min()));
  return total / static_cast<double>(posteriors.rows());
}

}  // namespace pdnn
