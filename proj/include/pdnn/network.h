// pdnn/network.h

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

#ifndef PDNN_NETWORK_H_
#define PDNN_NETWORK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pdnn/matrix.h"
#include "pdnn/random.h"

namespace pdnn {

// Convolution front-end of a CNN: every layer is a 1-D "valid" convolution
// along the frequency axis followed by non-overlapping max-pooling.
struct ConvStackSpec {
  std::size_t input_maps = 0;
  std::vector<std::size_t> num_filters;  // one entry per conv layer
  std::size_t filter_width = 5;
  std::size_t pool_size = 2;

  bool empty() const { return num_filters.empty(); }
  bool operator==(const ConvStackSpec &) const = default;
};

// Topology and regularisation knobs of a network.
//
// layer_sizes = input, hidden..., output.  With maxout_group g > 1 each
// hidden size counts pooled units; the linear layer underneath is g times
// wider.  For a CNN, layer_sizes[0] is the flattened input
// (input_maps x band) and the remaining entries are the fully-connected
// layers stacked on top of the conv front-end.  bottleneck_index, when set,
// is a position in layer_sizes naming a hidden layer.
struct NetSpec {
  std::vector<std::size_t> layer_sizes;
  ActivationKind hidden_activation = ActivationKind::kSigmoid;
  std::size_t maxout_group = 1;
  double dropout_factor = 0.0;
  std::optional<std::size_t> bottleneck_index;
  ConvStackSpec conv;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t num_targets() const { return layer_sizes.back(); }
  std::size_t num_hidden() const { return layer_sizes.size() - 2; }
  // Index into Network::layers() of the bottleneck layer.
  std::size_t BottleneckLayer() const;

  // ShapeError / DomainError on inconsistent settings.
  void Validate() const;

  bool operator==(const NetSpec &) const = default;
};

// Parses "250:1024:1024:1901".  Everything but layer_sizes is copied from
// `options`.  ParseError names the token position on non-integer or zero
// entries and on fewer than two entries.
NetSpec ParseNetSpec(std::string_view text, const NetSpec &options = {});
std::string FormatLayerSizes(std::span<const std::size_t> sizes);

struct ConvLayerSpec {
  std::size_t input_maps = 0;
  std::size_t input_band_len = 0;
  std::size_t num_filters = 0;
  std::size_t filter_width = 0;
  std::size_t pool_size = 1;
  ActivationKind activation = ActivationKind::kSigmoid;

  std::size_t input_dim() const { return input_maps * input_band_len; }
  std::size_t conv_len() const { return input_band_len - filter_width + 1; }
  std::size_t pooled_len() const { return conv_len() / pool_size; }
  std::size_t output_dim() const { return num_filters * pooled_len(); }
  // ShapeError naming the lengths when the filter does not fit or the conv
  // output is not divisible by the pool size.
  void Validate() const;

  bool operator==(const ConvLayerSpec &) const = default;
};

// Input is laid out map-major (in[m][t] at column m * band + t), output
// likewise (out[f][p] at f * pooled_len + p).  filters(f, m * width + k)
// is the tap k weight from input map m to output map f.
struct ConvLayer {
  ConvLayerSpec spec;
  Matrix filters;  // num_filters x (input_maps * filter_width)
  Vector bias;     // num_filters
};

// Fully-connected hidden layer.  With maxout_group > 1 the activation is
// ignored and each group of maxout_group consecutive linear units is
// max-pooled into one output.
struct DenseLayer {
  Matrix weights;  // in x linear_dim
  Vector bias;     // linear_dim
  ActivationKind activation = ActivationKind::kSigmoid;
  std::size_t maxout_group = 1;
  double dropout_factor = 0.0;

  std::size_t input_dim() const { return weights.rows(); }
  std::size_t linear_dim() const { return weights.cols(); }
  std::size_t output_dim() const { return weights.cols() / maxout_group; }
};

// Affine output layer with softmax.
struct SoftmaxLayer {
  Matrix weights;
  Vector bias;
};

using Layer = std::variant<ConvLayer, DenseLayer, SoftmaxLayer>;

std::size_t LayerInputDim(const Layer &layer);
std::size_t LayerOutputDim(const Layer &layer);

// Ordered layer stack.  A classifier ends in exactly one SoftmaxLayer; a
// feature extractor (see TruncateAt in model-io.h) has none, and with no
// layers at all is the identity on input_dim() columns.
class Network {
 public:
  Network() = default;
  // ShapeError unless adjacent dimensions conform and any softmax is last.
  Network(std::size_t input_dim, std::vector<Layer> layers);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const;
  bool has_softmax() const;
  const std::vector<Layer> &layers() const { return layers_; }

  // Mutable access invalidates forward passes taken before it.
  Layer &mutable_layer(std::size_t i);

  // Weights then bias of every layer, in layer order.  Mutable access
  // invalidates earlier forward passes.
  std::vector<std::span<double>> ParameterBlocks();
  std::vector<std::span<const double>> ParameterBlocks() const;
  std::size_t NumParameters() const;

  // Token that changes whenever parameters may have been modified.
  std::uint64_t generation() const { return generation_; }

 private:
  void Touch();

  std::size_t input_dim_ = 0;
  std::vector<Layer> layers_;
  std::uint64_t generation_ = 0;
};

// Zero-initialised network of the given topology.
Network BuildNetwork(const NetSpec &spec);
// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero, drawn
// layer by layer in row-major order from rng.
Network InitNetwork(const NetSpec &spec, SeededRng &rng);

enum class Mode { kTrain, kInfer };

struct LayerCache {
  Matrix linear;  // dense/softmax: affine output; conv: activated conv maps
  Matrix mask;    // dropout mask (train mode, dropout_factor > 0)
  std::vector<std::uint32_t> argmax;  // maxout / pooling winners, columns of `linear`
};

struct ForwardPass {
  Mode mode = Mode::kInfer;
  std::uint64_t generation = 0;
  // activations[0] is the input batch, activations[i + 1] the output of
  // layer i (after pooling and dropout).
  std::vector<Matrix> activations;
  std::vector<LayerCache> caches;

  const Matrix &output() const { return activations.back(); }
};

// Train mode multiplies every dense hidden output by a Bernoulli(1 - p)
// mask drawn from rng; infer mode scales it by (1 - p) instead.
ForwardPass Forward(const Network &net, const Matrix &batch, Mode mode, SeededRng &rng);
// Infer-mode output only.
Matrix Infer(const Network &net, const Matrix &batch);

// Max over consecutive groups of `group` columns; ties go to the lowest
// index.  The second member holds the winning column of each output.
std::pair<Matrix, std::vector<std::uint32_t>> MaxoutPool(const Matrix &linear,
                                                        std::size_t group);

// Conv + activation + pooling of one ConvLayer.  `cache` (optional)
// receives the activated conv maps and pooling winners.
Matrix ConvForward(const ConvLayer &layer, const Matrix &input, LayerCache *cache = nullptr);

struct LayerGradient {
  Matrix weights;  // same shape as the layer's weights / filters
  Vector bias;
};

struct Gradients {
  std::vector<LayerGradient> layers;
  double loss = 0.0;  // mean cross-entropy of the batch

  std::vector<std::span<const double>> Blocks() const;
};

// Exact gradients of mean cross-entropy against `targets` (rows are
// distributions over classes).  The pass must come from Forward() in
// train mode on the current parameters; ContractError otherwise.
Gradients Backward(const Network &net, const ForwardPass &pass, const Matrix &targets);
Gradients Backward(const Network &net, const ForwardPass &pass,
                   std::span<const std::uint32_t> labels);

Matrix OneHot(std::span<const std::uint32_t> labels, std::size_t num_classes);
double MeanCrossEntropy(const Matrix &posteriors, const Matrix &targets);

}  // namespace pdnn

#endif  // PDNN_NETWORK_H_
