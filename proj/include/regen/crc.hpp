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
#include <string>

#include "regen/bits.hpp"
#include "regen/error.hpp"

namespace regen {

/// CRC parameterization. The defaults are CRC-32 as used by IEEE 802.3:
/// polynomial 0x04C11DB7, reflected input and output, all-ones init and
/// final complement.
struct CrcParams {
  unsigned width = 32;
  std::uint32_t poly = 0x04C11DB7u;
  std::uint32_t init = 0xFFFFFFFFu;
  std::uint32_t xorout = 0xFFFFFFFFu;
  bool reflected = true;

  std::uint32_t mask() const noexcept {
    return width >= 32 ? 0xFFFFFFFFu : ((1u << width) - 1u);
  }
  void validate() const {
    if (width < 1 || width > 32) throw Error(Errc::InvalidParams, "CRC width must be in [1, 32]");
  }

  friend bool operator==(const CrcParams&, const CrcParams&) = default;
};

/// Named parameter sets by width: CRC-32 (IEEE), CRC-16/ARC, CRC-8/SMBUS.
inline CrcParams crc_for_width(unsigned width) {
  switch (width) {
    case 32: return CrcParams{};
    case 16: return CrcParams{16, 0x8005u, 0, 0, true};
    case 8: return CrcParams{8, 0x07u, 0, 0, false};
  }
  throw Error(Errc::InvalidParams, "no CRC defined for width " + std::to_string(width) + "; use 8, 16 or 32");
}

enum class Verdict { Success, Fail };

namespace detail {

inline std::uint32_t reflect(std::uint32_t v, unsigned width) {
  std::uint32_t out = 0;
  for (unsigned i = 0; i < width; ++i)
    if (v & (1u << i)) out |= 1u << (width - 1 - i);
  return out;
}

}  // namespace detail

/// Bitwise CRC over a bit sequence, bits consumed in sequence order.
inline std::uint32_t crc_bits(std::span<const std::uint8_t> bits, const CrcParams& p = {}) {
  p.validate();
  const std::uint32_t mask = p.mask();
  if (p.reflected) {
    const std::uint32_t rpoly = detail::reflect(p.poly & mask, p.width);
    std::uint32_t reg = detail::reflect(p.init & mask, p.width);
    for (std::uint8_t bit : bits) {
      const bool fb = ((reg ^ bit) & 1u) != 0;
      reg >>= 1;
      if (fb) reg ^= rpoly;
    }
    return (reg ^ p.xorout) & mask;
  }
  const std::uint32_t top = 1u << (p.width - 1);
  std::uint32_t reg = p.init & mask;
  for (std::uint8_t bit : bits) {
    const bool fb = ((reg & top) != 0) != (bit != 0);
    reg = (reg << 1) & mask;
    if (fb) reg ^= p.poly & mask;
  }
  return (reg ^ p.xorout) & mask;
}

/// Byte-oriented CRC: bytes enter least significant bit first for reflected
/// parameter sets and most significant bit first otherwise.
inline std::uint32_t crc_bytes(std::span<const std::uint8_t> bytes, const CrcParams& p = {}) {
  if (p.reflected) return crc_bits(bytes_to_bits(bytes), p);
  BitSequence bits(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    for (unsigned b = 0; b < 8; ++b) bits[8 * i + b] = (bytes[i] >> (7 - b)) & 1u;
  return crc_bits(bits, p);
}

/// The r checksum bits in the order they are appended: least significant
/// first for reflected CRCs (the wire order), most significant first otherwise.
inline BitSequence checksum_to_bits(std::uint32_t value, const CrcParams& p = {}) {
  BitSequence bits(p.width);
  for (unsigned i = 0; i < p.width; ++i) {
    const unsigned shift = p.reflected ? i : p.width - 1 - i;
    bits[i] = (value >> shift) & 1u;
  }
  return bits;
}

inline std::uint32_t bits_to_checksum(std::span<const std::uint8_t> bits, const CrcParams& p = {}) {
  std::uint32_t value = 0;
  for (unsigned i = 0; i < p.width; ++i) {
    const unsigned shift = p.reflected ? i : p.width - 1 - i;
    if (bits[i]) value |= 1u << shift;
  }
  return value;
}

/// payload || checksum(payload).
inline BitSequence crc_append(BitSequence payload, const CrcParams& p = {}) {
  const BitSequence tail = checksum_to_bits(crc_bits(payload, p), p);
  payload.insert(payload.end(), tail.begin(), tail.end());
  return payload;
}

inline Verdict crc_verify(std::span<const std::uint8_t> extended, const CrcParams& p = {}) {
  p.validate();
  if (extended.size() <= p.width) {
    throw Error(Errc::TooShort, "need more than " + std::to_string(p.width) + " bits to verify");
  }
  const std::size_t body = extended.size() - p.width;
  const std::uint32_t expect = bits_to_checksum(extended.subspan(body), p);
  return crc_bits(extended.first(body), p) == expect ? Verdict::Success : Verdict::Fail;
}

}  // namespace regen
