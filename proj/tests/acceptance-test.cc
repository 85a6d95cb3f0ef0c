// tests/acceptance-test.cc

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


// End-to-end acceptance checks.  Each criterion prints one PASS/FAIL line
// with its measurement and runtime; the exit status is non-zero when any
// criterion fails or overruns its time budget.  Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli-util.h"
#include "pdnn/errors.h"
#include "pdnn/model-io.h"
#include "pdnn/synth.h"
#include "test-util.h"

using namespace pdnn;
using namespace pdnn::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records a failed sub-check; the first few are kept in the detail.
  void Expect(bool ok, const std::string &what) {
    if (ok) return;
    if (pass || std::count(detail.begin(), detail.end(), ';') < 3)
      detail += (detail.empty() ? "" : "; ") + what;
    pass = false;
  }
  void Note(const std::string &what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string Fmt(const char *format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// Runs the CLI; a non-zero exit becomes a failed sub-check.
Run MustRun(Outcome &o, const std::vector<std::string> &args) {
  Run r = Pdnn(args);
  std::string line = r.err.substr(0, r.err.find('\n'));
  o.Expect(r.code == 0, args[0] + " exited " + std::to_string(r.code) + ": " + line);
  return r;
}

double LastValidFer(const Run &r) {
  auto epochs = Lines(r.out, "epoch ");
  return epochs.empty() ? 100.0 : ValidFer(epochs.back());
}

// --- 1 ---------------------------------------------------------------------

Outcome GradientFidelity() {
  Outcome o;
  SeededRng rng(20260101);
  double worst = 0.0;
  for (int trial = 0; trial < 20; trial++) {
    Network net = RandomSmallNetwork(rng, trial % 5, trial % 2 == 1);
    Matrix x = RandomMatrix(rng, 5, net.input_dim());
    std::vector<std::uint32_t> labels;
    for (int i = 0; i < 5; i++) labels.push_back(static_cast<std::uint32_t>(rng.Below(net.output_dim())));
    SeededRng mask_rng(rng.NextU64());
    SeededRng forward_rng = mask_rng;
    Gradients g = Backward(net, Forward(net, x, Mode::kTrain, forward_rng), labels);
    auto numeric = NumericGradient(net, x, OneHot(labels, net.output_dim()), mask_rng);
    double err = MaxRelativeError(Flatten(g.Blocks()), numeric);
    worst = std::max(worst, err);
    o.Expect(err < 1e-4, "network " + std::to_string(trial) + " rel err " + Fmt("%.3g", err));
  }
  o.Note("20 networks, max rel err " + Fmt("%.3g", worst));
  return o;
}

// --- 2 ---------------------------------------------------------------------

bool ByKey(const FrameRecord &a, const FrameRecord &b) {
  return std::tie(a.utt_index, a.frame_index) < std::tie(b.utt_index, b.frame_index);
}

Outcome PFileRoundTrip() {
  Outcome o;
  TempDir dir;
  SeededRng rng(77);
  const std::string path = dir.File("a.pfile"), text_path = dir.File("b.pfile");
  std::size_t packings = 0;
  for (int trial = 0; trial < 1000 && o.pass; trial++) {
    std::vector<FrameRecord> records;
    bool labels = true;
    if (trial == 0) {
      records = ExampleRecordsAsFloat();
    } else {
      labels = trial % 7 != 0;
      records = RandomRecords(rng, 1 + rng.Below(5), 8, 1 + rng.Below(12), 1 + rng.Below(2000));
      if (!labels)
        for (auto &r : records) r.label = 0;
    }
    const std::string tag = "archive " + std::to_string(trial);
    WritePFile(records, path, labels);
    o.Expect(ReadPFile(path) == records, tag + " changed on write/read");

    std::ostringstream text;
    WritePFileText(path, text);
    std::istringstream in(text.str());
    PFileFromText(in, text_path);
    o.Expect(Slurp(text_path) == Slurp(path), tag + " changed on text round trip");

    auto sorted = records;
    std::sort(sorted.begin(), sorted.end(), ByKey);
    const std::size_t record_bytes =
        PFileHeader::RecordBytesFor(records[0].features.size(), labels);
    for (bool random : {false, true}) {
      for (bool stream : {false, true}) {
        DataSpec spec{path, (1 + rng.Below(5)) * record_bytes + rng.Below(record_bytes), random,
                      stream};
        PFileReader reader(spec);
        SeededRng shuffle(trial);
        for (int pass = 0; pass < 2; pass++) {
          reader.Rewind();
          std::vector<FrameRecord> seen;
          while (auto part = reader.Next(shuffle))
            seen.insert(seen.end(), part->records.begin(), part->records.end());
          std::sort(seen.begin(), seen.end(), ByKey);
          o.Expect(seen == sorted, tag + " lost records under partition=" +
                                       std::to_string(spec.partition_bytes) +
                                       " random=" + std::to_string(random) +
                                       " stream=" + std::to_string(stream));
          packings++;
        }
      }
    }
  }
  o.Note("1000 archives, " + std::to_string(packings) + " partitioned passes");
  return o;
}

// --- 3 ---------------------------------------------------------------------

// Every adjacent pair of layers conforms and the net maps in -> out.
bool Chains(const Network &net, std::size_t in, std::size_t out) {
  std::size_t dim = net.input_dim();
  if (dim != in) return false;
  for (const auto &layer : net.layers()) {
    if (LayerInputDim(layer) != dim) return false;
    dim = LayerOutputDim(layer);
  }
  if (dim != out) return false;
  return Infer(net, Matrix(2, in)).cols() == out;
}

Outcome TopologyFidelity() {
  Outcome o;
  NetSpec dnn = ParseNetSpec("250:1024:1024:1024:1024:1024:1901");
  Network dnn_net = BuildNetwork(dnn);
  o.Expect(dnn_net.layers().size() == 6 && Chains(dnn_net, 250, 1901), "DNN chain");

  NetSpec bnf_options;
  bnf_options.bottleneck_index = 6;
  NetSpec dbnf = ParseNetSpec("250:1024:1024:1024:1024:1024:42:1024:1901", bnf_options);
  dbnf.Validate();
  Network dbnf_net = BuildNetwork(dbnf);
  o.Expect(Chains(dbnf_net, 250, 1901), "DBNF chain");
  Network extractor = TruncateToBottleneck(dbnf_net, dbnf);
  o.Expect(Chains(extractor, 250, 42), "DBNF extractor is not 250 -> 42");

  SeededRng rng(3);
  auto spliced = Splice(RandomRecords(rng, 3, 10, 42), 4);
  o.Expect(!spliced.empty() && spliced[0].features.size() == 378, "splice(42, 4) != 378");

  NetSpec cnn_options;
  cnn_options.conv = {11, {64, 128}, 5, 2};
  NetSpec cnn = ParseNetSpec("440:1024:1024:1901", cnn_options);
  cnn.Validate();
  Network cnn_net = BuildNetwork(cnn);
  const auto &layers = cnn_net.layers();
  o.Expect(layers.size() == 5, "CNN has " + std::to_string(layers.size()) + " layers");
  if (layers.size() == 5) {
    o.Expect(std::holds_alternative<ConvLayer>(layers[0]) &&
                 std::holds_alternative<ConvLayer>(layers[1]),
             "first two CNN layers are not conv");
    o.Expect(std::holds_alternative<DenseLayer>(layers[2]) &&
                 std::holds_alternative<DenseLayer>(layers[3]) &&
                 std::holds_alternative<SoftmaxLayer>(layers[4]),
             "top three CNN layers are not fully connected");
    o.Expect(LayerOutputDim(layers[0]) == 64 * 18 && LayerOutputDim(layers[1]) == 128 * 7,
             "conv output dims");
  }
  o.Expect(Chains(cnn_net, 440, 1901), "CNN chain");
  bool rejected = false;
  try {
    NetSpec bad = ParseNetSpec("442:1024:1024:1901", cnn_options);
    bad.Validate();
  } catch (const ShapeError &) {
    rejected = true;
  }
  o.Expect(rejected, "442-dim CNN input accepted");
  o.Note("DNN 250->1901, DBNF bottleneck 42, splice 378, CNN 440->1152->896->1901");
  return o;
}

// --- 4 ---------------------------------------------------------------------

Vector RandomVector(SeededRng &rng, std::size_t n) {
  Vector v(n);
  for (double &x : v) x = rng.Gaussian();
  return v;
}

Outcome DropoutContract() {
  Outcome o;
  SeededRng rng(404);
  const std::size_t samples = 10000, in = 4, out = 6;
  double worst_z = 0.0;
  for (double p : {0.1, 0.2, 0.5}) {
    DenseLayer layer;
    layer.weights = RandomMatrix(rng, in, out);
    layer.bias = RandomVector(rng, out);
    layer.activation = ActivationKind::kIdentity;
    layer.dropout_factor = p;
    Network net(in, {layer});
    Matrix x = RandomMatrix(rng, 1, in);
    Matrix batch(samples, in);
    for (std::size_t i = 0; i < samples; i++)
      std::copy(x.Row(0).begin(), x.Row(0).end(), batch.Row(i).begin());
    Matrix train = Forward(net, batch, Mode::kTrain, rng).output();
    Matrix infer = Infer(net, x);
    for (std::size_t j = 0; j < out; j++) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < samples; i++) {
        sum += train(i, j);
        sq += train(i, j) * train(i, j);
      }
      const double mean = sum / samples;
      const double se = std::sqrt((sq - samples * mean * mean) / (samples - 1) / samples);
      const double z = std::abs(mean - infer(0, j)) / se;
      worst_z = std::max(worst_z, z);
      o.Expect(z <= 3.0, "p=" + Fmt("%.1f", p) + " output " + std::to_string(j) + " off by " +
                             Fmt("%.2f", z) + " SE");
    }
  }

  DenseLayer plain;
  plain.weights = RandomMatrix(rng, in, out);
  plain.bias = RandomVector(rng, out);
  plain.activation = ActivationKind::kSigmoid;
  Network net(in, {plain});
  Matrix x = RandomMatrix(rng, 20, in);
  Matrix expected = ApplyActivation(ActivationKind::kSigmoid, Affine(x, plain.weights, plain.bias));
  SeededRng before = rng;
  o.Expect(Forward(net, x, Mode::kTrain, rng).output() == expected, "p=0 train output changed");
  o.Expect(Infer(net, x) == expected, "p=0 infer output changed");
  o.Expect(rng == before, "p=0 consumed random numbers");

  NetSpec spec = ParseNetSpec("6:7:5:3");
  spec.dropout_factor = 0.2;
  Network dropped = InitNetwork(spec, rng);
  Network parsed = ParseKaldiText(ExportKaldiText(dropped));
  double worst = 0.0;
  for (std::size_t l = 0; l < 3; l++) {
    const double factor = l == 0 ? 1.0 : 0.8;
    auto weights = [](const Layer &layer) {
      return std::holds_alternative<DenseLayer>(layer) ? std::get<DenseLayer>(layer).weights
                                                        : std::get<SoftmaxLayer>(layer).weights;
    };
    Matrix mine = weights(dropped.layers()[l]), theirs = weights(parsed.layers()[l]);
    for (std::size_t i = 0; i < mine.size(); i++)
      worst = std::max(worst, std::abs(theirs.Values()[i] - factor * mine.Values()[i]) /
                                  std::max(std::abs(mine.Values()[i]), 1e-12));
  }
  o.Expect(worst < 1e-8, "exported weights differ from x0.8 by rel " + Fmt("%.3g", worst));
  o.Note("max MC deviation " + Fmt("%.2f", worst_z) + " SE; p=0 exact; export x0.8 rel err " +
         Fmt("%.2g", worst));
  return o;
}

// --- 5 ---------------------------------------------------------------------

Outcome ScheduleAutomaton() {
  Outcome o;
  const LrSchedule s = ParseLrSchedule("D:0.08:0.5:0.05,0.05:15");
  SeededRng rng(505);
  std::size_t halvings = 0, stops = 0, capped = 0;
  for (int trial = 0; trial < 50; trial++) {
    std::vector<double> errors;
    double err = 40.0 + 20.0 * rng.Uniform();
    // Every fifth trajectory keeps improving well above the thresholds.
    const bool steady = trial % 5 == 0;
    for (int e = 0; e < 20; e++) {
      errors.push_back(err);
      if (steady) err -= 0.06 + rng.Uniform();
      else err -= rng.Below(4) == 0 ? 2.0 * rng.Uniform() : 0.12 * rng.Uniform() - 0.02;
    }
    const std::vector<double> rates = DriveSchedule(s, errors);
    const std::string tag = "trajectory " + std::to_string(trial);
    o.Expect(rates == ReferenceLrSequence(s, errors), tag + " disagrees with the reference");
    o.Expect(!rates.empty() && rates.size() <= 15 && rates[0] == 0.08, tag + " bad length/start");

    bool decaying = false;
    for (std::size_t e = 0; e + 1 < rates.size(); e++) {
      const double gain = e == 0 ? 1e300 : errors[e - 1] - errors[e];
      o.Expect(rates[e + 1] <= rates[e], tag + " increased");
      if (!decaying) {
        o.Expect((rates[e + 1] == rates[e] * 0.5) == (gain < 0.05), tag + " wrong halving");
        decaying = gain < 0.05;
      } else {
        o.Expect(gain >= 0.05 && rates[e + 1] == rates[e] * 0.5, tag + " wrong decay step");
      }
      if (rates[e + 1] < rates[e]) halvings++;
    }
    if (rates.size() == 15) {
      capped++;
    } else {
      const std::size_t last = rates.size() - 1;
      const double gain = last == 0 ? 1e300 : errors[last - 1] - errors[last];
      o.Expect(decaying && gain < 0.05, tag + " stopped without cause");
      stops++;
    }
  }
  o.Note("50 trajectories: " + std::to_string(halvings) + " halvings, " + std::to_string(stops) +
         " stop-rule exits, " + std::to_string(capped) + " capped");
  return o;
}

// --- 6 ---------------------------------------------------------------------

struct Corpus {
  TempDir dir;
  std::string train, valid;
};

// Training and validation sets that differ only in seed and size.
void MakeCorpus(Outcome &o, Corpus &c, std::vector<std::string> options = {},
                const std::string &train_utts = "100", const std::string &valid_utts = "20") {
  c.train = c.dir.File("train.pfile");
  c.valid = c.dir.File("valid.pfile");
  auto train = std::vector<std::string>{"gen-synth", "--output", c.train, "--utterances",
                                        train_utts};
  auto valid = std::vector<std::string>{"gen-synth", "--output", c.valid, "--seed", "2",
                                        "--utterances", valid_utts};
  train.insert(train.end(), options.begin(), options.end());
  valid.insert(valid.end(), options.begin(), options.end());
  MustRun(o, train);
  MustRun(o, valid);
}

std::vector<double> ReconErrors(const Run &r, int layer) {
  std::vector<double> errors;
  for (const auto &line : Lines(r.out, "layer " + std::to_string(layer) + " epoch "))
    errors.push_back(std::stod(line.substr(line.rfind(' ') + 1)));
  return errors;
}

Outcome PretrainingSanity() {
  Outcome o;
  Corpus c;
  MakeCorpus(o, c);
  const std::string spec = "10:64:64:3";
  const std::string train = c.train + ",partition=64k,random=true";
  auto finetune = [&](const std::string &wdir, bool pretrained) {
    std::vector<std::string> args = {"run-dnn", "--train-data", train, "--valid-data", c.valid,
                                     "--nnet-spec", spec, "--lrate", "C:0.1:1", "--batch-size",
                                     "32", "--seed", "1", "--wdir", c.dir.File(wdir),
                                     "--output-file", c.dir.File(wdir + ".nnet")};
    if (!pretrained) args.push_back("--no-pretrain");
    return LastValidFer(MustRun(o, args));
  };
  const double random_fer = finetune("random", false);
  std::string summary = "random init " + Fmt("%.1f", random_fer) + "%";
  for (std::string method : {"rbm", "sda"}) {
    Run r = MustRun(o, {"run-" + method, "--train-data", train, "--nnet-spec", spec, "--wdir",
                        c.dir.File(method), "--epochs", "20", "--batch-size", "32", "--seed", "1"});
    for (int layer = 1; layer <= 2; layer++) {
      auto errors = ReconErrors(r, layer);
      o.Expect(errors.size() == 20 && errors[19] < errors[0],
               method + " layer " + std::to_string(layer) + " recon error did not fall");
      if (errors.size() == 20)
        summary += "; " + method + " L" + std::to_string(layer) + " recon " +
                   Fmt("%.4f", errors[0]) + "->" + Fmt("%.4f", errors[19]);
    }
    const double fer = finetune(method, true);
    o.Expect(fer <= random_fer, method + " init " + Fmt("%.1f", fer) + "% > random init " +
                                    Fmt("%.1f", random_fer) + "% after epoch 1");
    summary += "; " + method + " init " + Fmt("%.1f", fer) + "%";
  }
  o.Note(summary);
  return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome EndToEnd() {
  Outcome o;
  Corpus c;
  MakeCorpus(o, c, {"--classes", "3", "--separation", "3"});
  Run dnn = MustRun(o, {"run-dnn", "--train-data", c.train + ",partition=64k,random=true",
                        "--valid-data", c.valid, "--nnet-spec", "10:64:64:3", "--lrate",
                        "C:0.1:5", "--batch-size", "32", "--wdir", c.dir.File("dnn"),
                        "--output-file", c.dir.File("dnn.nnet")});
  const double dnn_fer = LastValidFer(dnn);
  o.Expect(Lines(dnn.out, "epoch ").size() == 5 && dnn_fer < 10.0,
           "DNN valid-fer " + Fmt("%.2f", dnn_fer) + "%");

  MustRun(o, {"run-dnn", "--train-data", c.train + ",partition=64k,random=true", "--valid-data",
              c.valid, "--nnet-spec", "10:64:42:64:3", "--bottleneck-index", "2", "--lrate",
              "C:0.1:5", "--batch-size", "32", "--wdir", c.dir.File("dbnf"), "--output-file",
              c.dir.File("dbnf.nnet")});
  for (const char *name : {"train", "valid"}) {
    const std::string in = name == std::string("train") ? c.train : c.valid;
    MustRun(o, {"extract-bnf", "--model", c.dir.File("dbnf.nnet"), "--data", in, "--output-file",
                c.dir.File(std::string(name) + ".bnf"), "--splice", "4"});
  }
  MustRun(o, {"extract-bnf", "--model", c.dir.File("dbnf.nnet"), "--data", c.valid,
              "--output-file", c.dir.File("flat.bnf")});
  if (!o.pass) return o;
  const PFileHeader flat = ReadPFileHeader(c.dir.File("flat.bnf"));
  const PFileHeader spliced = ReadPFileHeader(c.dir.File("valid.bnf"));
  o.Expect(flat.feature_dim == 42, "bottleneck PFile has dim " + std::to_string(flat.feature_dim));
  o.Expect(spliced.feature_dim == 378, "spliced PFile has dim " + std::to_string(spliced.feature_dim));
  o.Expect(spliced.num_frames == ReadPFileHeader(c.valid).num_frames, "frame count changed");

  Run bnf = MustRun(o, {"run-dnn", "--train-data", c.dir.File("train.bnf") + ",partition=256k,random=true",
                        "--valid-data", c.dir.File("valid.bnf"), "--nnet-spec", "378:64:64:3",
                        "--lrate", "C:0.1:5", "--batch-size", "32", "--wdir", c.dir.File("bnfdnn"),
                        "--output-file", c.dir.File("bnf-dnn.nnet")});
  const double bnf_fer = LastValidFer(bnf);
  o.Expect(bnf_fer < 15.0, "BNF+DNN valid-fer " + Fmt("%.2f", bnf_fer) + "%");
  o.Note("DNN " + Fmt("%.2f", dnn_fer) + "% valid-fer; BNF 42 -> spliced 378; BNF+DNN " +
         Fmt("%.2f", bnf_fer) + "%");
  return o;
}

// --- 8 ---------------------------------------------------------------------

Outcome Determinism() {
  Outcome o;
  Corpus c;
  MakeCorpus(o, c, {}, "30", "10");
  Corpus wide;
  MakeCorpus(o, wide, {"--dim", "440"}, "10", "4");
  const std::string train = c.train + ",partition=16k,random=true,stream=true";

  struct Pathway {
    std::string name;
    std::vector<std::string> args;  // without --wdir / --output-file
    bool finetune;
  };
  const std::vector<Pathway> pathways = {
      {"dnn", {"run-dnn", "--train-data", train, "--valid-data", c.valid, "--nnet-spec",
               "10:16:16:3", "--dropout-factor", "0.2", "--lrate", "D:0.08:0.5:0.05,0.05:6",
               "--batch-size", "16"}, true},
      {"maxout", {"run-dnn", "--train-data", train, "--valid-data", c.valid, "--nnet-spec",
                  "10:8:8:3", "--maxout-group", "3", "--lrate", "C:0.1:3", "--batch-size", "16"},
       true},
      {"cnn", {"run-cnn", "--train-data", wide.train + ",partition=64k,random=true",
               "--valid-data", wide.valid, "--nnet-spec", "440:16:3", "--conv-filters", "4,4",
               "--dropout-factor", "0.1", "--lrate", "C:0.1:3", "--batch-size", "16"}, true},
      {"rbm", {"run-rbm", "--train-data", train, "--nnet-spec", "10:16:8:3", "--epochs", "3",
               "--batch-size", "16"}, false},
      {"sda", {"run-sda", "--train-data", train, "--nnet-spec", "10:16:8:3", "--epochs", "3",
               "--batch-size", "16"}, false},
  };

  std::size_t compared = 0;
  for (const auto &p : pathways) {
    std::string outputs[2];
    for (int run = 0; run < 2; run++) {
      const std::string wdir = c.dir.File(p.name + std::to_string(run));
      auto args = p.args;
      args.insert(args.end(), {"--wdir", wdir});
      if (p.finetune) args.insert(args.end(), {"--output-file", wdir + ".nnet"});
      MustRun(o, args);
      outputs[run] = Slurp(p.finetune ? wdir + ".nnet" : wdir + "/pretrain.stack");
    }
    o.Expect(!outputs[0].empty() && outputs[0] == outputs[1], p.name + " runs differ");
    compared++;

    if (!p.finetune) continue;
    // Interrupt after two epochs, then resume.
    const std::string wdir = c.dir.File(p.name + "-resumed");
    auto args = p.args;
    args.insert(args.end(), {"--wdir", wdir, "--output-file", wdir + ".nnet"});
    FailAfter buf("epoch 3 ");
    std::ostream failing(&buf);
    failing.exceptions(std::ios::badbit);
    std::ostringstream err;
    const int code = RunCli(args, failing, err);
    args.push_back("--resume");
    Run resumed = MustRun(o, args);
    o.Expect(code == kExitTraining, p.name + " was not interrupted");
    o.Expect(Lines(resumed.out, "resumed from").size() == 1, p.name + " did not resume");
    o.Expect(Slurp(wdir + ".nnet") == outputs[0], p.name + " resumed run differs");
    compared++;
  }

  // Bottleneck extraction is a pure function of model and data.
  const std::string model = c.dir.File("dbnf.nnet");
  MustRun(o, {"run-dnn", "--train-data", train, "--valid-data", c.valid, "--nnet-spec",
              "10:12:4:12:3", "--bottleneck-index", "2", "--lrate", "C:0.1:2", "--wdir",
              c.dir.File("dbnf"), "--output-file", model});
  for (const char *name : {"x1.bnf", "x2.bnf"})
    MustRun(o, {"extract-bnf", "--model", model, "--data", c.valid, "--output-file",
                c.dir.File(name), "--splice", "2"});
  o.Expect(Slurp(c.dir.File("x1.bnf")) == Slurp(c.dir.File("x2.bnf")), "extract-bnf differs");
  compared++;
  o.Note(std::to_string(compared) + " bit-identical comparisons (dnn, maxout, cnn, rbm, sda, "
         "resume x3, extract-bnf)");
  return o;
}

// --- 9 ---------------------------------------------------------------------

Outcome ExportRoundTrip() {
  Outcome o;
  SeededRng rng(909);
  const ActivationKind kinds[] = {ActivationKind::kSigmoid, ActivationKind::kTanh,
                                  ActivationKind::kIdentity};
  double worst = 0.0;
  for (int trial = 0; trial < 30; trial++) {
    NetSpec spec;
    spec.layer_sizes = {1 + rng.Below(20)};
    const std::size_t hidden = rng.Below(4);
    for (std::size_t h = 0; h < hidden; h++) spec.layer_sizes.push_back(1 + rng.Below(30));
    spec.layer_sizes.push_back(2 + rng.Below(10));
    spec.hidden_activation = kinds[rng.Below(3)];
    // Dropout on the top hidden layer has no export; keep it to deeper nets.
    if (hidden == 0 || trial % 3 == 0) spec.dropout_factor = 0.0;
    else spec.dropout_factor = 0.5 * rng.Uniform();
    Network net = InitNetwork(spec, rng);
    for (auto block : net.ParameterBlocks())
      for (double &v : block) v += 0.3 * rng.Gaussian();
    if (spec.dropout_factor > 0.0) {
      // The top hidden layer may not carry dropout; clear it there.
      auto &top = std::get<DenseLayer>(net.mutable_layer(net.layers().size() - 2));
      top.dropout_factor = 0.0;
    }
    Network parsed = ParseKaldiText(ExportKaldiText(net));
    Matrix x = RandomMatrix(rng, 100, net.input_dim(), 2.0);
    Matrix a = Infer(net, x), b = Infer(parsed, x);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); i++)
      diff = std::max(diff, std::abs(a.Values()[i] - b.Values()[i]));
    worst = std::max(worst, diff);
    o.Expect(diff <= 1e-6, "network " + std::to_string(trial) + " differs by " + Fmt("%.3g", diff));
  }
  o.Note("30 networks x 100 inputs, max abs diff " + Fmt("%.3g", worst));
  return o;
}

struct Criterion {
  int number;
  const char *name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char **argv) {
  const std::vector<Criterion> criteria = {
      {1, "gradient-fidelity", 60, GradientFidelity},
      {2, "pfile-round-trip", 30, PFileRoundTrip},
      {3, "topology-fidelity", 60, TopologyFidelity},
      {4, "dropout-contract", 60, DropoutContract},
      {5, "schedule-automaton", 60, ScheduleAutomaton},
      {6, "pretraining-sanity", 180, PretrainingSanity},
      {7, "end-to-end", 300, EndToEnd},
      {8, "determinism", 300, Determinism},
      {9, "export-round-trip", 60, ExportRoundTrip},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; i++) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto &c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.number) == selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.Expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.Expect(seconds <= c.limit_seconds, "over the time limit");
    if (!o.pass) failures++;
    std::printf("criterion %d %-19s %s  %.1fs/%.0fs  %s\n", c.number, c.name,
                o.pass ? "PASS" : "FAIL", seconds, c.limit_seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
