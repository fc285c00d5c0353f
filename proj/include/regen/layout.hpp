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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regen/bits.hpp"
#include "regen/crc.hpp"
#include "regen/error.hpp"
#include "regen/galois.hpp"

namespace regen {

/// How a payload maps onto the beta * B message symbols of a stored file:
///
///   [ payload bits | zero padding | CRC (r bits) ]   = beta * B * m bits
///
/// The CRC covers everything before it, so a reconstruction is accepted only
/// if every message symbol decoded consistently.
class MessageLayout {
 public:
  MessageLayout(unsigned m, std::size_t symbols_per_stripe, std::size_t stripes, CrcParams crc = {})
      : m_(m), per_stripe_(symbols_per_stripe), stripes_(stripes), crc_(crc) {
    crc_.validate();
    if (capacity_bits() <= crc_.width) {
      throw Error(Errc::InvalidParams, "message capacity of " + std::to_string(capacity_bits()) +
                                           " bits cannot hold a " + std::to_string(crc_.width) +
                                           "-bit CRC");
    }
  }

  unsigned m() const noexcept { return m_; }
  std::size_t symbols_per_stripe() const noexcept { return per_stripe_; }
  std::size_t stripes() const noexcept { return stripes_; }
  std::size_t total_symbols() const noexcept { return per_stripe_ * stripes_; }
  const CrcParams& crc() const noexcept { return crc_; }

  std::size_t capacity_bits() const noexcept { return total_symbols() * m_; }
  std::size_t data_bits() const noexcept { return capacity_bits() - crc_.width; }
  std::size_t max_payload_bytes() const noexcept { return data_bits() / 8; }

  /// Smallest stripe count whose data region holds payload_bytes.
  static std::size_t stripes_for(std::size_t payload_bytes, unsigned m, std::size_t per_stripe,
                                 unsigned crc_width = 32) {
    const std::size_t needed = payload_bytes * 8 + crc_width;
    const std::size_t stripe_bits = per_stripe * m;
    return std::max<std::size_t>(1, (needed + stripe_bits - 1) / stripe_bits);
  }

  std::vector<gf::Element> pack(std::span<const std::uint8_t> payload) const {
    if (payload.size() > max_payload_bytes()) {
      throw Error(Errc::PayloadTooLarge, std::to_string(payload.size()) + " bytes exceed the " +
                                             std::to_string(max_payload_bytes()) + "-byte capacity");
    }
    BitSequence bits = bytes_to_bits(payload);
    bits.resize(data_bits(), 0);
    return bits_to_symbols(crc_append(std::move(bits), crc_), m_);
  }

  bool verify(std::span<const gf::Element> symbols) const {
    if (symbols.size() != total_symbols()) return false;
    return crc_verify(symbols_to_bits(symbols, m_), crc_) == Verdict::Success;
  }

  std::vector<std::uint8_t> unpack(std::span<const gf::Element> symbols, std::size_t payload_bytes) const {
    if (symbols.size() != total_symbols() || payload_bytes > max_payload_bytes()) {
      throw Error(Errc::LengthMismatch, "message symbols do not match the layout");
    }
    BitSequence bits = symbols_to_bits(symbols, m_);
    bits.resize(payload_bytes * 8);
    return bits_to_bytes(bits);
  }

 private:
  unsigned m_;
  std::size_t per_stripe_;
  std::size_t stripes_;
  CrcParams crc_;
};

}  // namespace regen
