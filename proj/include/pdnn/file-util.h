// pdnn/file-util.h

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

#ifndef PDNN_FILE_UTIL_H_
#define PDNN_FILE_UTIL_H_

#include <fstream>
#include <string>
#include <string_view>

namespace pdnn {

// Output file that only appears at `path` once Commit() succeeds.  Data is
// written to a sibling temporary which is renamed over `path` on commit and
// removed if the object is destroyed first.
class AtomicOutputFile {
 public:
  explicit AtomicOutputFile(std::string path);
  ~AtomicOutputFile();
  AtomicOutputFile(const AtomicOutputFile &) = delete;
  AtomicOutputFile &operator=(const AtomicOutputFile &) = delete;

  std::ofstream &stream() { return stream_; }
  void Commit();

  const std::string &path() const { return path_; }

 private:
  std::string path_;
  std::string temp_path_;
  std::ofstream stream_;
  bool committed_ = false;
};

void WriteFileAtomically(const std::string &path, std::string_view bytes);
// Throws pdnn::Error when the file cannot be opened.
std::string ReadFileBytes(const std::string &path);

}  // namespace pdnn

#endif  // PDNN_FILE_UTIL_H_
