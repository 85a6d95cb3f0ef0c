// src/cli-internal.h

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

// Shared pieces of the command implementations.  Internal header.

#ifndef PDNN_SRC_CLI_INTERNAL_H_
#define PDNN_SRC_CLI_INTERNAL_H_

#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

namespace pdnn::cli {

struct Streams {
  std::ostream &out;
  std::ostream &err;
};

// A subcommand and what to run once its flags are parsed.
using Command = std::pair<CLI::App *, std::function<void()>>;

void AddTrainingCommands(CLI::App &app, Streams io, std::vector<Command> *commands);
void AddDataCommands(CLI::App &app, Streams io, std::vector<Command> *commands);

// --wdir if given, else $PDNN_WDIR; created if missing.  Throws
// pdnn::ParseError when neither is set.
std::string ResolveWorkDir(const std::string &flag);

// "utterances=U frames=F dim=D"
std::string HeaderSummary(std::uint64_t utterances, std::uint64_t frames, std::uint32_t dim);

}  // namespace pdnn::cli

#endif  // PDNN_SRC_CLI_INTERNAL_H_
