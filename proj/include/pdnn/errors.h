// pdnn/errors.h

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

#ifndef PDNN_ERRORS_H_
#define PDNN_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pdnn {

// Base of every error the toolkit throws.  The CLI maps the concrete
// subclass to an exit code (see ExitCodeFor in cli.h).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix / layer dimensions do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside its mathematical domain (probability > 1, negative
// stddev, empty evaluation set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed spec string or text input.  `position` is the token / field
// index the parser was looking at.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Records handed to a writer violate archive invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A PFile on disk is truncated or inconsistent with its header.
class CorruptArchiveError : public Error {
 public:
  CorruptArchiveError(const std::string &what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Training data inconsistent with the model (label out of range, wrong
// feature dimension).
class DataError : public Error {
 public:
  using Error::Error;
};

// Native checkpoint unreadable: bad magic, version, truncation, checksum.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

// The requested export format cannot represent the network.
class UnsupportedExportError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. backward() on a forward pass that no longer matches
// the network parameters.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite loss or parameters).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdnn

#endif  // PDNN_ERRORS_H_
