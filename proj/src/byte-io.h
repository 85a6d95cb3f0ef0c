// src/byte-io.h

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

// Little-endian encoding helpers shared by the PFile and checkpoint code.
// Internal header; not installed.

#ifndef PDNN_SRC_BYTE_IO_H_
#define PDNN_SRC_BYTE_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>

namespace pdnn::internal {

template <typename U>
void PutLe(std::string *out, U value) {
  static_assert(std::is_unsigned_v<U>);
  for (std::size_t i = 0; i < sizeof(U); i++)
    out->push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

inline void PutF32(std::string *out, float v) { PutLe(out, std::bit_cast<std::uint32_t>(v)); }
inline void PutF64(std::string *out, double v) { PutLe(out, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U GetLe(const char *p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); i++)
    value |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  return value;
}

inline float GetF32(const char *p) { return std::bit_cast<float>(GetLe<std::uint32_t>(p)); }
inline double GetF64(const char *p) { return std::bit_cast<double>(GetLe<std::uint64_t>(p)); }

// Bounds-checked cursor over a byte buffer.  `fail` is called with the
// offending offset when a read would run past the end; it must throw.
template <typename Fail>
class ByteReader {
 public:
  ByteReader(std::string_view bytes, Fail fail) : bytes_(bytes), fail_(fail) {}

  template <typename U>
  U Get() {
    Need(sizeof(U));
    U v = GetLe<U>(bytes_.data() + pos_);
    pos_ += sizeof(U);
    return v;
  }
  double GetDouble() { return std::bit_cast<double>(Get<std::uint64_t>()); }
  std::string_view Take(std::size_t n) {
    Need(n);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail_(pos_);
  }

  std::string_view bytes_;
  Fail fail_;
  std::size_t pos_ = 0;
};

}  // namespace pdnn::internal

#endif  // PDNN_SRC_BYTE_IO_H_
