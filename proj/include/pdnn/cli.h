// pdnn/cli.h

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

// The `pdnn` command-line tool, callable in-process.
//
// Subcommands: run-dnn, run-cnn, run-rbm, run-sda, extract-bnf, pfile
// (info, to-text, from-text, splice) and gen-synth.  Exit codes: 0 on
// success, 1 on usage errors, 2 on data, format or shape errors, 3 when
// training fails.

#ifndef PDNN_CLI_H_
#define PDNN_CLI_H_

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace pdnn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitTraining = 3;

// Work directory used when --wdir is not given.
inline constexpr const char *kWorkDirEnv = "PDNN_WDIR";

int ExitCodeFor(const std::exception &e);

// `args` excludes the program name.  Logs go to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace pdnn

#endif  // PDNN_CLI_H_
