// src/cli-train.cc

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


// run-dnn, run-cnn, run-rbm, run-sda and extract-bnf.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>

#include "cli-internal.h"
#include "pdnn/cli.h"
#include "pdnn/errors.h"
#include "pdnn/file-util.h"
#include "pdnn/finetune.h"
#include "pdnn/model-io.h"
#include "pdnn/pfile-io.h"
#include "pdnn/pretrain.h"

namespace pdnn::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char *kStackFile = "pretrain.stack";
constexpr const char *kCheckpointFile = "finetune.ckpt";

struct FinetuneFlags {
  std::string train_data;
  std::string valid_data;
  std::string nnet_spec;
  std::string lrate = "D:0.08:0.5:0.05,0.05:15";
  std::string wdir;
  std::string output_file;
  std::string output_format = "native";
  std::string activation = "sigmoid";
  double dropout_factor = 0.0;
  std::size_t maxout_group = 1;
  std::size_t batch_size = 256;
  std::uint64_t seed = 1;
  std::optional<std::size_t> bottleneck_index;
  std::string ptr_file;
  bool no_pretrain = false;
  bool resume = false;

  // run-cnn only.
  std::size_t input_maps = 11;
  std::vector<std::size_t> conv_filters{64, 128};
  std::size_t filter_width = 5;
  std::size_t pool_size = 2;
};

struct PretrainFlags {
  std::string train_data;
  std::string nnet_spec;
  std::string wdir;
  std::uint64_t seed = 1;
  std::size_t epochs = 10;
  double lrate = 0.08;
  double gb_lrate = 0.005;
  bool sample_visible = false;
  std::size_t batch_size = 128;
  double corruption = 0.2;
  bool standardize = true;
};

void AddFinetuneFlags(CLI::App *sub, FinetuneFlags *f) {
  sub->add_option("--train-data", f->train_data, "Training PFile: path[,partition=N][,random=B][,stream=B]")
      ->required();
  sub->add_option("--valid-data", f->valid_data, "Validation PFile, same syntax")->required();
  sub->add_option("--nnet-spec", f->nnet_spec, "Layer sizes, e.g. 250:1024:1024:1901")->required();
  sub->add_option("--lrate,--lrte", f->lrate, "Learning-rate schedule, D:... or C:lr:epochs")
      ->capture_default_str();
  sub->add_option("--wdir", f->wdir, std::string("Work directory (default $") + kWorkDirEnv + ")");
  sub->add_option("--output-file", f->output_file, "Final model path")->required();
  sub->add_option("--output-format", f->output_format, "native or kaldi")
      ->check(CLI::IsMember({"native", "kaldi"}))
      ->capture_default_str();
  sub->add_option("--activation", f->activation, "sigmoid, tanh, relu or linear")
      ->capture_default_str();
  sub->add_option("--dropout-factor", f->dropout_factor, "Dropout probability of hidden units")
      ->capture_default_str();
  sub->add_option("--maxout-group", f->maxout_group, "Units per maxout group (1 = no maxout)")
      ->capture_default_str();
  sub->add_option("--batch-size", f->batch_size, "Minibatch size")->capture_default_str();
  sub->add_option("--seed", f->seed, "Random seed")->capture_default_str();
  sub->add_option("--bottleneck-index", f->bottleneck_index,
                  "Position in --nnet-spec of the bottleneck layer");
  sub->add_option("--ptr-file", f->ptr_file,
                  std::string("Pre-trained stack (default <wdir>/") + kStackFile + " if present)");
  sub->add_flag("--no-pretrain", f->no_pretrain, "Ignore any pre-trained stack");
  sub->add_flag("--resume", f->resume,
                std::string("Continue from <wdir>/") + kCheckpointFile);
}

NetSpec BuildSpec(const FinetuneFlags &f, bool cnn) {
  NetSpec options;
  options.hidden_activation = ParseActivation(f.activation);
  options.maxout_group = f.maxout_group;
  options.dropout_factor = f.dropout_factor;
  options.bottleneck_index = f.bottleneck_index;
  if (cnn) {
    options.conv.input_maps = f.input_maps;
    options.conv.num_filters = f.conv_filters;
    options.conv.filter_width = f.filter_width;
    options.conv.pool_size = f.pool_size;
  }
  NetSpec spec = ParseNetSpec(f.nnet_spec, options);
  spec.Validate();
  return spec;
}

void CheckDim(const PartitionSource &data, const NetSpec &spec, const std::string &what) {
  if (data.feature_dim() != spec.input_dim())
    throw DataError(what + " has dimension " + std::to_string(data.feature_dim()) +
                    ", --nnet-spec expects " + std::to_string(spec.input_dim()));
}

void RunFinetune(const FinetuneFlags &f, bool cnn, Streams io) {
  const NetSpec spec = BuildSpec(f, cnn);
  const LrSchedule schedule = ParseLrSchedule(f.lrate);
  const DataSpec train_spec = ParseDataSpec(f.train_data);
  const DataSpec valid_spec = ParseDataSpec(f.valid_data);
  const bool kaldi = f.output_format == "kaldi";
  if (f.batch_size == 0) throw ParseError("--batch-size must be positive", 0);
  const std::string wdir = ResolveWorkDir(f.wdir);
  const std::string checkpoint_path = (fs::path(wdir) / kCheckpointFile).string();

  PFileReader train(train_spec);
  PFileReader valid(valid_spec);
  CheckDim(train, spec, train_spec.path);
  CheckDim(valid, spec, valid_spec.path);

  SeededRng rng(f.seed);
  Network net;
  TrainState state = InitialTrainState(schedule);
  if (f.resume && fs::exists(checkpoint_path)) {
    ModelCheckpoint c = LoadModel(checkpoint_path);
    if (!(c.spec == spec))
      throw DataError(checkpoint_path + " was trained with a different network spec (" +
                      FormatLayerSizes(c.spec.layer_sizes) + ")");
    net = std::move(c.net);
    state = c.state;
    rng.set_state(c.rng_state);
    io.out << "resumed from " << checkpoint_path << " after epoch " << state.epoch << '\n';
  } else {
    net = InitNetwork(spec, rng);
    std::string stack_path = f.ptr_file;
    if (stack_path.empty() && !f.no_pretrain && fs::exists(fs::path(wdir) / kStackFile))
      stack_path = (fs::path(wdir) / kStackFile).string();
    if (!stack_path.empty() && !f.no_pretrain) {
      PretrainedStack stack = LoadStack(stack_path);
      ApplyPretrainedStack(stack, &net);
      io.out << "initialized " << stack.layers.size() << " hidden layers from " << stack_path
             << '\n';
    }
  }
  if (kaldi) CheckKaldiExportable(net);

  if (state.epoch == 0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", Evaluate(net, valid));
    io.out << "initial valid-fer " << buf << "%\n";
  }
  FinetuneOptions options;
  options.schedule = schedule;
  options.batch_size = f.batch_size;
  options.on_epoch = [&](const EpochStats &stats, const TrainState &next) {
    io.out << FormatEpochLog(stats) << std::endl;
    SaveModel(ModelCheckpoint{spec, net, next, rng.state()}, checkpoint_path);
  };
  state = Finetune(&net, train, valid, options, rng, state);

  if (kaldi)
    SaveKaldiText(net, f.output_file);
  else
    SaveModel(ModelCheckpoint{spec, net, state, rng.state()}, f.output_file);
  io.out << "wrote " << f.output_file << " (" << f.output_format << ")\n";
}

void RunPretrain(const PretrainFlags &f, PretrainMethod method, Streams io) {
  const NetSpec spec = ParseNetSpec(f.nnet_spec);
  PretrainConfig config;
  config.epochs = f.epochs;
  config.learning_rate = f.lrate;
  config.gaussian_learning_rate = f.gb_lrate;
  config.batch_size = f.batch_size;
  config.reconstruction = f.sample_visible ? Reconstruction::kSample : Reconstruction::kMean;
  config.corruption_level = f.corruption;
  const DataSpec data_spec = ParseDataSpec(f.train_data);
  const std::string wdir = ResolveWorkDir(f.wdir);

  PFileReader data(data_spec);
  if (spec.num_hidden() > 0 && data.feature_dim() != spec.input_dim())
    throw DataError(data_spec.path + " has dimension " + std::to_string(data.feature_dim()) +
                    ", --nnet-spec expects " + std::to_string(spec.input_dim()));
  SeededRng rng(f.seed);
  auto observer = [&](const PretrainEpoch &e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", e.recon_error);
    io.out << "layer " << e.layer + 1 << " epoch " << e.epoch << " recon-error " << buf
           << std::endl;
  };

  PretrainedStack stack;
  stack.method = method;
  if (spec.num_hidden() > 0) {
    std::optional<FeatureStats> stats;
    std::unique_ptr<StandardizedSource> standardized;
    PartitionSource *source = &data;
    if (f.standardize) {
      stats = ComputeFeatureStats(data);
      standardized = std::make_unique<StandardizedSource>(data, *stats);
      source = standardized.get();
    }
    stack = method == PretrainMethod::kRbm ? PretrainRbmStack(spec, *source, config, rng, observer)
                                           : PretrainSdaStack(spec, *source, config, rng, observer);
    if (stats) FoldStandardization(*stats, &stack);
  }
  const std::string path = (fs::path(wdir) / kStackFile).string();
  SaveStack(stack, path);
  io.out << "wrote " << path << " (" << stack.layers.size() << " layers)\n";
}

struct ExtractFlags {
  std::string model;
  std::string data;
  std::string output_file;
  int splice = 0;
};

void RunExtract(const ExtractFlags &f, Streams io) {
  if (f.splice < 0) throw ParseError("--splice must be >= 0", 0);
  const DataSpec data_spec = ParseDataSpec(f.data);
  ModelCheckpoint c = LoadModel(f.model);
  Network extractor = TruncateToBottleneck(c.net, c.spec);
  PFileHeader h;
  if (f.splice == 0) {
    h = ExtractFeatures(extractor, data_spec.path, f.output_file, data_spec.partition_bytes);
  } else {
    const std::string raw = f.output_file + ".bnf." + std::to_string(::getpid());
    struct Cleanup {
      std::string path;
      ~Cleanup() {
        std::error_code ec;
        fs::remove(path, ec);
      }
    } cleanup{raw};
    ExtractFeatures(extractor, data_spec.path, raw, data_spec.partition_bytes);
    h = SplicePFile(raw, f.output_file, f.splice, data_spec.partition_bytes);
  }
  io.out << HeaderSummary(h.num_utterances, h.num_frames, h.feature_dim) << '\n';
}

}  // namespace

void AddTrainingCommands(CLI::App &app, Streams io, std::vector<Command> *commands) {
  auto dnn_flags = std::make_shared<FinetuneFlags>();
  CLI::App *dnn = app.add_subcommand("run-dnn", "Fine-tune a fully-connected network with SGD");
  AddFinetuneFlags(dnn, dnn_flags.get());
  commands->push_back({dnn, [=] { RunFinetune(*dnn_flags, false, io); }});

  auto cnn_flags = std::make_shared<FinetuneFlags>();
  CLI::App *cnn = app.add_subcommand("run-cnn", "Train a frequency-convolution network with SGD");
  AddFinetuneFlags(cnn, cnn_flags.get());
  cnn->add_option("--input-maps", cnn_flags->input_maps, "Feature maps the input splits into")
      ->capture_default_str();
  cnn->add_option("--conv-filters", cnn_flags->conv_filters, "Filters per conv layer, e.g. 64,128")
      ->delimiter(',')
      ->capture_default_str();
  cnn->add_option("--filter-width", cnn_flags->filter_width, "Filter length along frequency")
      ->capture_default_str();
  cnn->add_option("--pool-size", cnn_flags->pool_size, "Max-pooling size")->capture_default_str();
  commands->push_back({cnn, [=] { RunFinetune(*cnn_flags, true, io); }});

  for (PretrainMethod method : {PretrainMethod::kRbm, PretrainMethod::kSda}) {
    auto flags = std::make_shared<PretrainFlags>();
    const bool rbm = method == PretrainMethod::kRbm;
    CLI::App *sub = app.add_subcommand(rbm ? "run-rbm" : "run-sda",
                                       rbm ? "Pre-train hidden layers as a stack of RBMs (CD-1)"
                                           : "Pre-train hidden layers as stacked denoising autoencoders");
    sub->add_option("--train-data", flags->train_data, "Training PFile")->required();
    sub->add_option("--nnet-spec", flags->nnet_spec, "Layer sizes of the network to initialize")
        ->required();
    sub->add_option("--wdir", flags->wdir, std::string("Work directory (default $") + kWorkDirEnv + ")");
    sub->add_option("--seed", flags->seed, "Random seed")->capture_default_str();
    sub->add_option("--epochs", flags->epochs, "Epochs per layer")->capture_default_str();
    sub->add_option("--lrate", flags->lrate, "Learning rate")->capture_default_str();
    if (rbm) {
      sub->add_option("--gb-lrate", flags->gb_lrate, "Learning rate of the Gaussian-Bernoulli layer")
          ->capture_default_str();
      sub->add_flag("--sample-visible", flags->sample_visible,
                    "Sample binary reconstructions in the Bernoulli layers instead of using "
                    "their probabilities");
    } else {
      sub->add_option("--corruption", flags->corruption, "Masking-noise level")->capture_default_str();
    }
    sub->add_option("--batch-size", flags->batch_size, "Minibatch size")->capture_default_str();
    sub->add_option("--standardize", flags->standardize,
                    "Standardize inputs for training and fold the transform into layer 1")
        ->capture_default_str();
    commands->push_back({sub, [=] { RunPretrain(*flags, method, io); }});
  }

  auto extract_flags = std::make_shared<ExtractFlags>();
  CLI::App *extract =
      app.add_subcommand("extract-bnf", "Write bottleneck activations of a trained model to a PFile");
  extract->add_option("--model", extract_flags->model, "Native model with a bottleneck layer")
      ->required();
  extract->add_option("--data", extract_flags->data, "Input PFile")->required();
  extract->add_option("--output-file", extract_flags->output_file, "Output PFile")->required();
  extract->add_option("--splice", extract_flags->splice, "Context frames on each side")
      ->capture_default_str();
  commands->push_back({extract, [=] { RunExtract(*extract_flags, io); }});
}

}  // namespace pdnn::cli
