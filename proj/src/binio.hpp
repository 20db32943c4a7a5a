// Copyright (c) 2026, the sgdec authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SGDEC_SRC_BINIO_HPP_
#define SGDEC_SRC_BINIO_HPP_

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "sgdec/errors.hpp"

// Little-endian binary primitives shared by the feature-file and
// checkpoint readers/writers.

namespace sgdec::binio {

inline void write_u32(std::ostream& out, std::uint32_t value) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline void write_f32(std::ostream& out, float value) {
  std::uint32_t bits;
  std::memcpy(&bits, &value, 4);
  write_u32(out, bits);
}

inline std::uint32_t read_u32(std::istream& in, const std::string& what) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw DataError("truncated read of " + what);
  std::uint32_t value = 0;
  for (int i = 3; i >= 0; --i) value = (value << 8) | bytes[i];
  return value;
}

inline std::uint64_t read_u64(std::istream& in, const std::string& what) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8))
    throw DataError("truncated read of " + what);
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[i];
  return value;
}

inline float read_f32(std::istream& in, const std::string& what) {
  const std::uint32_t bits = read_u32(in, what);
  float value;
  std::memcpy(&value, &bits, 4);
  return value;
}

}  // namespace sgdec::binio

#endif  // SGDEC_SRC_BINIO_HPP_
