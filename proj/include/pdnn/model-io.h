// pdnn/model-io.h

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

// Model persistence and feature extraction.
//
// Native checkpoint layout (little-endian):
//   char[5]  magic "PDNN1"
//   u32      format version (1)
//   u32      payload kind (1 = model, 2 = pre-trained stack)
//   u64      payload length
//   payload
//   u32      CRC-32 of every preceding byte
//
// Model payload: net spec, parameters (ParameterBlocks() order, f64),
// training state, rng state.  Stack payload: method, then per layer its
// shape, weights and bias.
//
// Kaldi-style text networks:
//   <Nnet>
//   <AffineTransform> OUT IN
//   [
//     w w w ...        (OUT rows of IN values: the transposed weights)
//     w w w ... ]
//   [ b b b ... ]
//   <Sigmoid> OUT OUT  (or <Tanh>; absent for identity layers)
//   ...
//   <Softmax> OUT OUT
//   </Nnet>
// Values are printed with 9 significant digits.

#ifndef PDNN_MODEL_IO_H_
#define PDNN_MODEL_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "pdnn/finetune.h"
#include "pdnn/network.h"
#include "pdnn/pfile-io.h"
#include "pdnn/pretrain.h"
#include "pdnn/random.h"

namespace pdnn {

inline constexpr std::string_view kCheckpointMagic = "PDNN1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct ModelCheckpoint {
  NetSpec spec;
  Network net;
  TrainState state;
  SeededRng::State rng_state{};
};

// ShapeError when `net` is not shaped like BuildNetwork(spec).
std::string SerializeModel(const ModelCheckpoint &checkpoint);
// CheckpointError on any damage: bad magic, version or kind, checksum
// mismatch, truncation or inconsistent contents.
ModelCheckpoint ParseModel(std::string_view bytes);
void SaveModel(const ModelCheckpoint &checkpoint, const std::string &path);
ModelCheckpoint LoadModel(const std::string &path);

std::string SerializeStack(const PretrainedStack &stack);
PretrainedStack ParseStack(std::string_view bytes);
void SaveStack(const PretrainedStack &stack, const std::string &path);
PretrainedStack LoadStack(const std::string &path);

// Infer-mode network as Kaldi-style text: every layer that consumes the
// output of a dropout layer gets its weights scaled by (1 - p).
// UnsupportedExportError for conv, maxout or rectifier layers.
std::string ExportKaldiText(const Network &net);
// Throws what ExportKaldiText would, without formatting anything.
void CheckKaldiExportable(const Network &net);
void SaveKaldiText(const Network &net, const std::string &path);
// ParseError (position = token index) on malformed text.
Network ParseKaldiText(std::string_view text);
Network LoadKaldiText(const std::string &path);

// The first `num_layers` layers of `net` as a feature extractor.
Network TruncateAt(const Network &net, std::size_t num_layers);
// Layers up to and including the bottleneck hidden layer of `spec`.
// DomainError when spec has no bottleneck or it does not name a hidden layer.
Network TruncateToBottleneck(const Network &net, const NetSpec &spec);

// Writes `in_path` through `extractor` (infer mode) into `out_path`,
// keeping indices and labels.  DataError on a dimension mismatch.
PFileHeader ExtractFeatures(const Network &extractor, const std::string &in_path,
                            const std::string &out_path,
                            std::uint64_t partition_bytes = kDefaultPartitionBytes);

}  // namespace pdnn

#endif  // PDNN_MODEL_IO_H_
