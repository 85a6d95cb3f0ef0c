// src/cli.cc

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


#include "pdnn/cli.h"

#include <cstdlib>
#include <filesystem>

#include "cli-internal.h"
#include "pdnn/errors.h"

namespace pdnn {

namespace cli {

std::string ResolveWorkDir(const std::string &flag) {
  std::string dir = flag;
  if (dir.empty()) {
    const char *env = std::getenv(kWorkDirEnv);
    if (env != nullptr) dir = env;
  }
  if (dir.empty())
    throw ParseError(std::string("no work directory: pass --wdir or set ") + kWorkDirEnv, 0);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string HeaderSummary(std::uint64_t utterances, std::uint64_t frames, std::uint32_t dim) {
  return "utterances=" + std::to_string(utterances) + " frames=" + std::to_string(frames) +
         " dim=" + std::to_string(dim);
}

}  // namespace cli

int ExitCodeFor(const std::exception &e) {
  if (dynamic_cast<const ParseError *>(&e) != nullptr) return kExitUsage;
  if (dynamic_cast<const TrainingError *>(&e) != nullptr) return kExitTraining;
  if (dynamic_cast<const ContractError *>(&e) != nullptr) return kExitTraining;
  if (dynamic_cast<const Error *>(&e) != nullptr) return kExitData;
  if (dynamic_cast<const std::filesystem::filesystem_error *>(&e) != nullptr) return kExitData;
  return kExitTraining;
}

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app("pdnn: feed-forward network training for speech features", "pdnn");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  std::vector<cli::Command> commands;
  cli::Streams io{out, err};
  cli::AddTrainingCommands(app, io, &commands);
  cli::AddDataCommands(app, io, &commands);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    for (auto &[sub, run] : commands) {
      if (sub->parsed()) {
        run();
        return kExitOk;
      }
    }
  } catch (const std::exception &e) {
    err << "pdnn: error: " << e.what() << '\n';
    return ExitCodeFor(e);
  }
  return kExitUsage;
}

}  // namespace pdnn
