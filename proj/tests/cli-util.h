// tests/cli-util.h

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


// Helpers for driving RunCli() in-process from tests.

#ifndef PDNN_TESTS_CLI_UTIL_H_
#define PDNN_TESTS_CLI_UTIL_H_

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdnn/cli.h"

namespace pdnn::testing {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

inline Run Pdnn(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  Run r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string Slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline std::vector<std::string> Lines(const std::string &text, const std::string &prefix) {
  std::vector<std::string> found;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (line.rfind(prefix, 0) == 0) found.push_back(line);
  return found;
}

// -1 when the line has no valid-fer field.
inline double ValidFer(const std::string &line) {
  auto at = line.find("valid-fer ");
  if (at == std::string::npos) return -1.0;
  return std::stod(line.substr(at + 10));
}

// Makes the stream fail once `trigger` has been written, as a crash
// in the middle of training would.
class FailAfter : public std::stringbuf {
 public:
  explicit FailAfter(std::string trigger) : trigger_(std::move(trigger)) {}

 protected:
  int sync() override {
    if (str().find(trigger_) != std::string::npos) return -1;
    return std::stringbuf::sync();
  }

 private:
  std::string trigger_;
};

}  // namespace pdnn::testing

#endif  // PDNN_TESTS_CLI_UTIL_H_
