// src/model-io.cc

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


#include "pdnn/model-io.h"

#include <zlib.h>

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "byte-io.h"
#include "pdnn/errors.h"
#include "pdnn/file-util.h"

namespace pdnn {

namespace {

using internal::PutF64;
using internal::PutLe;

constexpr std::uint32_t kModelPayload = 1;
constexpr std::uint32_t kStackPayload = 2;

std::uint32_t Crc32(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32_z(crc32_z(0L, Z_NULL, 0), reinterpret_cast<const Bytef *>(bytes.data()), bytes.size()));
}

std::string Frame(std::uint32_t kind, const std::string &payload) {
  std::string out(kCheckpointMagic);
  PutLe<std::uint32_t>(&out, kCheckpointVersion);
  PutLe<std::uint32_t>(&out, kind);
  PutLe<std::uint64_t>(&out, payload.size());
  out += payload;
  PutLe<std::uint32_t>(&out, Crc32(out));
  return out;
}

[[noreturn]] void Corrupt(const std::string &what) { throw CheckpointError("checkpoint: " + what); }

// Validates the envelope and returns the payload.
std::string_view Unframe(std::string_view bytes, std::uint32_t want_kind) {
  constexpr std::size_t kHead = 5 + 4 + 4 + 8;
  if (bytes.size() < kHead + 4) Corrupt("file is truncated (" + std::to_string(bytes.size()) + " bytes)");
  if (bytes.substr(0, 5) != kCheckpointMagic) Corrupt("bad magic, not a pdnn checkpoint");
  const auto version = internal::GetLe<std::uint32_t>(bytes.data() + 5);
  if (version != kCheckpointVersion)
    Corrupt("unsupported format version " + std::to_string(version) + " (expected " +
            std::to_string(kCheckpointVersion) + ")");
  const auto kind = internal::GetLe<std::uint32_t>(bytes.data() + 9);
  const auto length = internal::GetLe<std::uint64_t>(bytes.data() + 13);
  if (length != bytes.size() - kHead - 4)
    Corrupt("payload length " + std::to_string(length) + " does not match file size " +
            std::to_string(bytes.size()));
  const auto stored = internal::GetLe<std::uint32_t>(bytes.data() + bytes.size() - 4);
  if (stored != Crc32(bytes.substr(0, bytes.size() - 4))) Corrupt("checksum mismatch");
  if (kind != want_kind)
    Corrupt(std::string("holds a ") + (kind == kStackPayload ? "pre-trained stack" : "model") +
            ", expected a " + (want_kind == kStackPayload ? "pre-trained stack" : "model"));
  return bytes.substr(kHead, length);
}

auto Reader(std::string_view payload) {
  auto fail = [](std::size_t) -> void { Corrupt("payload is truncated"); };
  return internal::ByteReader(payload, fail);
}

template <typename R>
std::size_t GetSize(R &r) {
  const auto v = r.template Get<std::uint64_t>();
  if (v > (std::uint64_t{1} << 40)) Corrupt("implausible size field " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

void PutSpec(std::string *out, const NetSpec &spec) {
  PutLe<std::uint64_t>(out, spec.layer_sizes.size());
  for (auto s : spec.layer_sizes) PutLe<std::uint64_t>(out, s);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(spec.hidden_activation));
  PutLe<std::uint64_t>(out, spec.maxout_group);
  PutF64(out, spec.dropout_factor);
  out->push_back(spec.bottleneck_index ? 1 : 0);
  PutLe<std::uint64_t>(out, spec.bottleneck_index.value_or(0));
  PutLe<std::uint64_t>(out, spec.conv.input_maps);
  PutLe<std::uint64_t>(out, spec.conv.num_filters.size());
  for (auto f : spec.conv.num_filters) PutLe<std::uint64_t>(out, f);
  PutLe<std::uint64_t>(out, spec.conv.filter_width);
  PutLe<std::uint64_t>(out, spec.conv.pool_size);
}

template <typename R>
NetSpec GetSpec(R &r) {
  NetSpec spec;
  spec.layer_sizes.resize(GetSize(r));
  for (auto &s : spec.layer_sizes) s = GetSize(r);
  const auto act = r.template Get<std::uint32_t>();
  if (act > static_cast<std::uint32_t>(ActivationKind::kIdentity))
    Corrupt("unknown activation code " + std::to_string(act));
  spec.hidden_activation = static_cast<ActivationKind>(act);
  spec.maxout_group = GetSize(r);
  spec.dropout_factor = r.GetDouble();
  const bool has_bottleneck = r.template Get<std::uint8_t>() != 0;
  const std::size_t bottleneck = GetSize(r);
  if (has_bottleneck) spec.bottleneck_index = bottleneck;
  spec.conv.input_maps = GetSize(r);
  spec.conv.num_filters.resize(GetSize(r));
  for (auto &f : spec.conv.num_filters) f = GetSize(r);
  spec.conv.filter_width = GetSize(r);
  spec.conv.pool_size = GetSize(r);
  try {
    spec.Validate();
  } catch (const Error &e) {
    Corrupt(std::string("stored net spec is invalid: ") + e.what());
  }
  return spec;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void WriteAffine(std::ostringstream &out, const Matrix &weights, std::span<const double> bias,
                 double scale) {
  out << "<AffineTransform> " << weights.cols() << ' ' << weights.rows() << "\n[";
  for (std::size_t o = 0; o < weights.cols(); o++) {
    out << "\n ";
    for (std::size_t i = 0; i < weights.rows(); i++) out << ' ' << Num(weights(i, o) * scale);
  }
  out << " ]\n[";
  for (double b : bias) out << ' ' << Num(b);
  out << " ]\n";
}

}  // namespace

std::string SerializeModel(const ModelCheckpoint &c) {
  const Network shape = BuildNetwork(c.spec);
  const auto blocks = c.net.ParameterBlocks();
  const auto expected = shape.ParameterBlocks();
  bool same = c.net.input_dim() == shape.input_dim() && blocks.size() == expected.size();
  for (std::size_t i = 0; same && i < blocks.size(); i++) same = blocks[i].size() == expected[i].size();
  if (!same) throw ShapeError("network does not match its spec " + FormatLayerSizes(c.spec.layer_sizes));

  std::string payload;
  PutSpec(&payload, c.spec);
  PutLe<std::uint64_t>(&payload, c.net.NumParameters());
  for (auto block : blocks)
    for (double v : block) PutF64(&payload, v);
  PutLe<std::uint64_t>(&payload, c.state.epoch);
  PutF64(&payload, c.state.current_lr);
  PutLe<std::uint32_t>(&payload, static_cast<std::uint32_t>(c.state.phase));
  PutLe<std::uint64_t>(&payload, c.state.error_history.size());
  for (double e : c.state.error_history) PutF64(&payload, e);
  for (auto word : c.rng_state) PutLe<std::uint64_t>(&payload, word);
  return Frame(kModelPayload, payload);
}

ModelCheckpoint ParseModel(std::string_view bytes) {
  auto r = Reader(Unframe(bytes, kModelPayload));
  ModelCheckpoint c;
  c.spec = GetSpec(r);
  c.net = BuildNetwork(c.spec);
  const std::size_t count = GetSize(r);
  if (count != c.net.NumParameters())
    Corrupt("holds " + std::to_string(count) + " parameters, spec needs " +
            std::to_string(c.net.NumParameters()));
  for (auto block : c.net.ParameterBlocks())
    for (double &v : block) v = r.GetDouble();
  c.state.epoch = GetSize(r);
  c.state.current_lr = r.GetDouble();
  const auto phase = r.template Get<std::uint32_t>();
  if (phase > static_cast<std::uint32_t>(TrainPhase::kStopped))
    Corrupt("unknown training phase " + std::to_string(phase));
  c.state.phase = static_cast<TrainPhase>(phase);
  c.state.error_history.resize(GetSize(r));
  for (double &e : c.state.error_history) e = r.GetDouble();
  for (auto &word : c.rng_state) word = r.template Get<std::uint64_t>();
  if (r.remaining() != 0) Corrupt(std::to_string(r.remaining()) + " unexpected trailing payload bytes");
  return c;
}

void SaveModel(const ModelCheckpoint &checkpoint, const std::string &path) {
  WriteFileAtomically(path, SerializeModel(checkpoint));
}

ModelCheckpoint LoadModel(const std::string &path) {
  std::string bytes;
  try {
    bytes = ReadFileBytes(path);
  } catch (const Error &e) {
    throw CheckpointError(e.what());
  }
  return ParseModel(bytes);
}

std::string SerializeStack(const PretrainedStack &stack) {
  std::string payload;
  PutLe<std::uint32_t>(&payload, stack.method == PretrainMethod::kRbm ? 0 : 1);
  PutLe<std::uint64_t>(&payload, stack.layers.size());
  for (const auto &l : stack.layers) {
    if (l.bias.size() != l.weights.cols())
      throw ShapeError("pre-trained layer bias does not match weights " + l.weights.ShapeString());
    PutLe<std::uint64_t>(&payload, l.weights.rows());
    PutLe<std::uint64_t>(&payload, l.weights.cols());
    for (double v : l.weights.Values()) PutF64(&payload, v);
    for (double v : l.bias) PutF64(&payload, v);
  }
  return Frame(kStackPayload, payload);
}

PretrainedStack ParseStack(std::string_view bytes) {
  auto r = Reader(Unframe(bytes, kStackPayload));
  PretrainedStack stack;
  const auto method = r.template Get<std::uint32_t>();
  if (method > 1) Corrupt("unknown pre-training method " + std::to_string(method));
  stack.method = method == 0 ? PretrainMethod::kRbm : PretrainMethod::kSda;
  stack.layers.resize(GetSize(r));
  for (auto &l : stack.layers) {
    const std::size_t rows = GetSize(r), cols = GetSize(r);
    if (rows * cols * 8 > r.remaining()) Corrupt("payload is truncated");
    l.weights = Matrix(rows, cols);
    for (double &v : l.weights.Values()) v = r.GetDouble();
    l.bias.resize(cols);
    for (double &v : l.bias) v = r.GetDouble();
  }
  for (std::size_t k = 1; k < stack.layers.size(); k++)
    if (stack.layers[k].weights.rows() != stack.layers[k - 1].weights.cols())
      Corrupt("layer " + std::to_string(k) + " does not chain onto the layer below");
  if (r.remaining() != 0) Corrupt(std::to_string(r.remaining()) + " unexpected trailing payload bytes");
  return stack;
}

void SaveStack(const PretrainedStack &stack, const std::string &path) {
  WriteFileAtomically(path, SerializeStack(stack));
}

PretrainedStack LoadStack(const std::string &path) {
  std::string bytes;
  try {
    bytes = ReadFileBytes(path);
  } catch (const Error &e) {
    throw CheckpointError(e.what());
  }
  return ParseStack(bytes);
}

void CheckKaldiExportable(const Network &net) {
  for (std::size_t i = 0; i < net.layers().size(); i++) {
    const Layer &layer = net.layers()[i];
    if (std::holds_alternative<ConvLayer>(layer))
      throw UnsupportedExportError("kaldi export: layer " + std::to_string(i) +
                                   " is convolutional; use the native format");
    const auto *d = std::get_if<DenseLayer>(&layer);
    if (d == nullptr) continue;
    if (d->maxout_group > 1)
      throw UnsupportedExportError("kaldi export: layer " + std::to_string(i) +
                                   " is a maxout layer; use the native format");
    if (d->activation == ActivationKind::kRectifier)
      throw UnsupportedExportError("kaldi export: no component for rectifier units (layer " +
                                   std::to_string(i) + ")");
    if (d->dropout_factor > 0.0 && i + 1 == net.layers().size())
      throw UnsupportedExportError("kaldi export: the final layer applies dropout scaling");
  }
}

std::string ExportKaldiText(const Network &net) {
  CheckKaldiExportable(net);
  std::ostringstream out;
  out << "<Nnet>\n";
  double incoming_dropout = 0.0;
  for (const Layer &layer : net.layers()) {
    const double scale = 1.0 - incoming_dropout;
    if (const auto *s = std::get_if<SoftmaxLayer>(&layer)) {
      WriteAffine(out, s->weights, s->bias, scale);
      out << "<Softmax> " << s->weights.cols() << ' ' << s->weights.cols() << '\n';
      continue;
    }
    const auto &d = std::get<DenseLayer>(layer);
    WriteAffine(out, d.weights, d.bias, scale);
    if (d.activation != ActivationKind::kIdentity) {
      out << (d.activation == ActivationKind::kSigmoid ? "<Sigmoid> " : "<Tanh> ")
          << d.output_dim() << ' ' << d.output_dim() << '\n';
    }
    incoming_dropout = d.dropout_factor;
  }
  out << "</Nnet>\n";
  return out.str();
}

void SaveKaldiText(const Network &net, const std::string &path) {
  WriteFileAtomically(path, ExportKaldiText(net));
}

namespace {

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) i++;
      std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) i++;
      if (i > start) tokens_.push_back(text.substr(start, i - start));
    }
  }

  bool done() const { return next_ >= tokens_.size(); }
  std::size_t position() const { return next_; }
  std::string_view Peek() const { return done() ? std::string_view() : tokens_[next_]; }

  std::string_view Take(const char *what) {
    if (done()) Fail(std::string("unexpected end of text, expected ") + what);
    return tokens_[next_++];
  }
  void Expect(std::string_view want) {
    if (Take(std::string(want).c_str()) != want)
      Fail("expected '" + std::string(want) + "', got '" + std::string(tokens_[next_ - 1]) + "'",
           next_ - 1);
  }
  std::size_t Count() {
    std::string_view t = Take("a dimension");
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || v == 0)
      Fail("'" + std::string(t) + "' is not a positive dimension", next_ - 1);
    return v;
  }
  double Real() {
    std::string_view t = Take("a number");
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
      Fail("'" + std::string(t) + "' is not a number", next_ - 1);
    return v;
  }

  [[noreturn]] void Fail(const std::string &what) const { Fail(what, next_); }
  [[noreturn]] void Fail(const std::string &what, std::size_t pos) const {
    throw ParseError("kaldi text: token " + std::to_string(pos) + ": " + what, pos);
  }

 private:
  std::vector<std::string_view> tokens_;
  std::size_t next_ = 0;
};

}  // namespace

Network ParseKaldiText(std::string_view text) {
  TokenStream in(text);
  in.Expect("<Nnet>");
  std::vector<Layer> layers;
  std::size_t input_dim = 0, current = 0;
  bool ended_in_softmax = false;
  while (in.Peek() != "</Nnet>") {
    if (ended_in_softmax) in.Fail("components after <Softmax>");
    const std::size_t at = in.position();
    in.Expect("<AffineTransform>");
    const std::size_t out_dim = in.Count(), in_dim = in.Count();
    if (layers.empty()) input_dim = in_dim;
    else if (in_dim != current)
      in.Fail("input dimension " + std::to_string(in_dim) + " does not match the previous output " +
                  std::to_string(current),
              at + 2);
    Matrix weights(in_dim, out_dim);
    Vector bias(out_dim);
    in.Expect("[");
    for (std::size_t o = 0; o < out_dim; o++)
      for (std::size_t i = 0; i < in_dim; i++) weights(i, o) = in.Real();
    in.Expect("]");
    in.Expect("[");
    for (double &b : bias) b = in.Real();
    in.Expect("]");
    current = out_dim;

    const std::string_view marker = in.Peek();
    if (marker == "<Softmax>" || marker == "<Sigmoid>" || marker == "<Tanh>") {
      in.Take("a marker");
      const std::size_t marker_at = in.position();
      if (in.Count() != out_dim || in.Count() != out_dim)
        in.Fail("marker dimensions must both equal " + std::to_string(out_dim), marker_at);
    }
    if (marker == "<Softmax>") {
      layers.push_back(SoftmaxLayer{std::move(weights), std::move(bias)});
      ended_in_softmax = true;
      continue;
    }
    DenseLayer d;
    d.weights = std::move(weights);
    d.bias = std::move(bias);
    d.activation = marker == "<Sigmoid>" ? ActivationKind::kSigmoid
                   : marker == "<Tanh>"  ? ActivationKind::kTanh
                                         : ActivationKind::kIdentity;
    layers.push_back(std::move(d));
  }
  if (layers.empty()) in.Fail("network has no components");
  in.Expect("</Nnet>");
  if (!in.done()) in.Fail("trailing text after </Nnet>");
  return Network(input_dim, std::move(layers));
}

Network LoadKaldiText(const std::string &path) { return ParseKaldiText(ReadFileBytes(path)); }

Network TruncateAt(const Network &net, std::size_t num_layers) {
  if (num_layers > net.layers().size())
    throw DomainError("cannot keep " + std::to_string(num_layers) + " layers of a " +
                      std::to_string(net.layers().size()) + "-layer network");
  std::vector<Layer> kept(net.layers().begin(),
                          net.layers().begin() + static_cast<std::ptrdiff_t>(num_layers));
  return Network(net.input_dim(), std::move(kept));
}

Network TruncateToBottleneck(const Network &net, const NetSpec &spec) {
  if (!spec.bottleneck_index) throw DomainError("the network has no bottleneck layer");
  const std::size_t idx = *spec.bottleneck_index;
  if (idx == 0 || idx + 1 >= spec.layer_sizes.size())
    throw DomainError("bottleneck index " + std::to_string(idx) + " is not a hidden layer of " +
                      FormatLayerSizes(spec.layer_sizes));
  const std::size_t layer = spec.BottleneckLayer();
  if (layer >= net.layers().size() || !std::holds_alternative<DenseLayer>(net.layers()[layer]))
    throw DomainError("bottleneck index " + std::to_string(idx) + " does not name a hidden layer");
  return TruncateAt(net, layer + 1);
}

PFileHeader ExtractFeatures(const Network &extractor, const std::string &in_path,
                            const std::string &out_path, std::uint64_t partition_bytes) {
  PFileReader reader(DataSpec{in_path, partition_bytes, false, true});
  if (reader.feature_dim() != extractor.input_dim())
    throw DataError(in_path + " has dimension " + std::to_string(reader.feature_dim()) +
                    ", extractor expects " + std::to_string(extractor.input_dim()));
  PFileWriter writer(out_path, static_cast<std::uint32_t>(extractor.output_dim()),
                     reader.header().label_present);
  SeededRng unused(0);
  while (auto part = reader.Next(unused)) {
    Matrix features = Infer(extractor, MakeBatch(part->records).features);
    for (std::size_t i = 0; i < part->records.size(); i++) {
      FrameRecord &r = part->records[i];
      r.features.assign(features.Row(i).begin(), features.Row(i).end());
      writer.Write(r);
    }
  }
  return writer.Close();
}

}  // namespace pdnn
