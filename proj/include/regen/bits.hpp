// Copyright 2026 The regen Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "regen/error.hpp"
#include "regen/galois.hpp"

namespace regen {

/// One bit per entry (0 or 1), in transmission order.
using BitSequence = std::vector<std::uint8_t>;

/// Byte i becomes bits 8i..8i+7, least-significant bit first. This is the
/// transmission order the reflected CRC-32 assumes, so a CRC over these bits
/// equals the familiar byte-oriented CRC-32 of the same bytes.
inline BitSequence bytes_to_bits(std::span<const std::uint8_t> bytes) {
  BitSequence bits(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    for (unsigned b = 0; b < 8; ++b) bits[8 * i + b] = (bytes[i] >> b) & 1u;
  return bits;
}

/// Inverse of bytes_to_bits; a trailing partial byte is zero-filled.
inline std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return bytes;
}

/// Each symbol contributes m bits, most significant first.
inline BitSequence symbols_to_bits(std::span<const gf::Element> symbols, unsigned m) {
  BitSequence bits(symbols.size() * m);
  for (std::size_t i = 0; i < symbols.size(); ++i)
    for (unsigned b = 0; b < m; ++b) bits[i * m + b] = (symbols[i].value() >> (m - 1 - b)) & 1u;
  return bits;
}

inline std::vector<gf::Element> bits_to_symbols(std::span<const std::uint8_t> bits, unsigned m) {
  if (bits.size() % m != 0) throw Error(Errc::LengthMismatch, "bit count is not a multiple of m");
  std::vector<gf::Element> out(bits.size() / m);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t v = 0;
    for (unsigned b = 0; b < m; ++b) v = (v << 1) | (bits[i * m + b] & 1u);
    out[i] = gf::Element(v);
  }
  return out;
}

}  // namespace regen
