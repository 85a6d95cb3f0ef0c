// src/cli-data.cc

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


// pfile {info,to-text,from-text,splice} and gen-synth.

#include <fstream>
#include <memory>

#include "cli-internal.h"
#include "pdnn/errors.h"
#include "pdnn/file-util.h"
#include "pdnn/pfile-io.h"
#include "pdnn/synth.h"

namespace pdnn::cli {

namespace {

struct PFileFlags {
  std::string input;
  std::string output;
  int context = 4;
};

struct SynthFlags {
  SynthConfig config;
  std::string output;
};

void Info(const PFileFlags &f, Streams io) {
  // A full read validates the record structure as well as the header.
  PFileHeader h;
  ReadPFile(f.input, &h);
  io.out << HeaderSummary(h.num_utterances, h.num_frames, h.feature_dim) << '\n';
}

void ToText(const PFileFlags &f, Streams io) {
  if (f.output.empty()) {
    WritePFileText(f.input, io.out);
    return;
  }
  AtomicOutputFile file(f.output);
  WritePFileText(f.input, file.stream());
  file.Commit();
}

void FromText(const PFileFlags &f, Streams io) {
  std::ifstream in(f.input);
  if (!in) throw DataError("cannot open " + f.input);
  PFileHeader h = PFileFromText(in, f.output);
  io.out << HeaderSummary(h.num_utterances, h.num_frames, h.feature_dim) << '\n';
}

void SpliceCommand(const PFileFlags &f, Streams io) {
  if (f.context < 0) throw ParseError("--context must be >= 0", 0);
  PFileHeader h = SplicePFile(f.input, f.output, f.context);
  io.out << HeaderSummary(h.num_utterances, h.num_frames, h.feature_dim) << '\n';
}

void GenSynth(const SynthFlags &f, Streams io) {
  PFileHeader h = WritePFile(GenerateSynthetic(f.config), f.output);
  io.out << HeaderSummary(h.num_utterances, h.num_frames, h.feature_dim) << '\n';
}

}  // namespace

void AddDataCommands(CLI::App &app, Streams io, std::vector<Command> *commands) {
  CLI::App *pfile = app.add_subcommand("pfile", "Inspect and convert PFile archives");
  pfile->require_subcommand(1);

  auto info = std::make_shared<PFileFlags>();
  CLI::App *sub = pfile->add_subcommand("info", "Print utterance, frame and dimension counts");
  sub->add_option("pfile", info->input, "PFile")->required();
  commands->push_back({sub, [=] { Info(*info, io); }});

  auto to_text = std::make_shared<PFileFlags>();
  sub = pfile->add_subcommand("to-text", "Dump records as tab-separated text");
  sub->add_option("pfile", to_text->input, "PFile")->required();
  sub->add_option("-o,--output", to_text->output, "Text file (default stdout)");
  commands->push_back({sub, [=] { ToText(*to_text, io); }});

  auto from_text = std::make_shared<PFileFlags>();
  sub = pfile->add_subcommand("from-text", "Build a PFile from a text dump");
  sub->add_option("text", from_text->input, "Text dump")->required();
  sub->add_option("pfile", from_text->output, "Output PFile")->required();
  commands->push_back({sub, [=] { FromText(*from_text, io); }});

  auto splice = std::make_shared<PFileFlags>();
  sub = pfile->add_subcommand("splice", "Concatenate each frame with its neighbours");
  sub->add_option("input", splice->input, "Input PFile")->required();
  sub->add_option("output", splice->output, "Output PFile")->required();
  sub->add_option("-c,--context", splice->context, "Frames on each side")->capture_default_str();
  commands->push_back({sub, [=] { SpliceCommand(*splice, io); }});

  auto synth = std::make_shared<SynthFlags>();
  sub = app.add_subcommand("gen-synth", "Write a synthetic labelled corpus of Gaussian class blobs");
  sub->add_option("--classes", synth->config.classes, "Number of classes")->capture_default_str();
  sub->add_option("--dim", synth->config.dim, "Feature dimension")->capture_default_str();
  sub->add_option("--frames-per-utt", synth->config.frames_per_utt, "Frames per utterance")
      ->capture_default_str();
  sub->add_option("--utterances", synth->config.utterances, "Number of utterances")
      ->capture_default_str();
  sub->add_option("--separation", synth->config.separation, "Distance of class means from the origin, in noise std units")
      ->capture_default_str();
  sub->add_option("--seed", synth->config.seed, "Seed of labels and noise")->capture_default_str();
  sub->add_option("--mean-seed", synth->config.mean_seed,
                  "Seed of the class directions used when classes exceed dim")
      ->capture_default_str();
  sub->add_option("--output", synth->output, "Output PFile")->required();
  commands->push_back({sub, [=] { GenSynth(*synth, io); }});
}

}  // namespace pdnn::cli
