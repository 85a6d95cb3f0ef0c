// src/file-util.cc

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

#include "pdnn/file-util.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "pdnn/errors.h"

namespace pdnn {

AtomicOutputFile::AtomicOutputFile(std::string path)
    : path_(std::move(path)),
      temp_path_(path_ + ".tmp." + std::to_string(::getpid())) {
  stream_.open(temp_path_, std::ios::binary | std::ios::trunc);
  if (!stream_) throw Error("cannot open " + temp_path_ + " for writing");
}

AtomicOutputFile::~AtomicOutputFile() {
  if (!committed_) {
    stream_.close();
    std::error_code ec;
    std::filesystem::remove(temp_path_, ec);
  }
}

void AtomicOutputFile::Commit() {
  stream_.flush();
  if (!stream_) throw Error("write to " + temp_path_ + " failed");
  stream_.close();
  std::error_code ec;
  std::filesystem::rename(temp_path_, path_, ec);
  if (ec) throw Error("cannot rename " + temp_path_ + " to " + path_ + ": " + ec.message());
  committed_ = true;
}

void WriteFileAtomically(const std::string &path, std::string_view bytes) {
  AtomicOutputFile out(path);
  out.stream().write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.Commit();
}

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace pdnn
