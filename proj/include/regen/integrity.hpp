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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regen/bits.hpp"
#include "regen/crc.hpp"
#include "regen/error.hpp"
#include "regen/galois.hpp"
#include "regen/rscode.hpp"

namespace regen {

enum class ChecksumScheme { Replicated, RsCoded };

constexpr std::string_view to_string(ChecksumScheme s) noexcept {
  return s == ChecksumScheme::Replicated ? "replicated" : "coded";
}

/// ceil(log2(x)) for x >= 1.
constexpr unsigned ceil_log2(std::size_t x) noexcept {
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < x) ++bits;
  return bits;
}

/// Symbol width for the coded scheme: ceil(log2(n-1)), raised until the
/// n-1 evaluation points a^0..a^(n-2) are distinct, and at least 2.
constexpr unsigned default_share_bits(std::size_t n) noexcept {
  unsigned bits = std::max(2u, ceil_log2(n - 1));
  while (((std::size_t{1} << bits) - 1) < n - 1) ++bits;
  return bits;
}

/// Number of m'-bit symbols carrying an r-bit checksum, ceil(r / m').
constexpr std::size_t share_dimension(unsigned crc_width, unsigned share_bits) noexcept {
  return (crc_width + share_bits - 1) / share_bits;
}

/// Turns one node's checksum into the shares held by its n-1 peers and back.
class ChecksumCodec {
 public:
  ChecksumCodec(ChecksumScheme scheme, std::size_t n, CrcParams crc = {},
                std::optional<unsigned> share_bits = std::nullopt)
      : scheme_(scheme), n_(n), crc_(crc) {
    crc_.validate();
    if (n < 2) throw Error(Errc::InvalidParams, "checksum directory needs at least two nodes");
    if (scheme == ChecksumScheme::RsCoded) {
      share_bits_ = share_bits.value_or(default_share_bits(n));
      const std::size_t kprime = regen::share_dimension(crc_.width, share_bits_);
      if (kprime > n - 1) {
        throw Error(Errc::InvalidParams,
                    "coded checksum needs k' = ceil(r/m') = " + std::to_string(kprime) +
                        " <= n-1 = " + std::to_string(n - 1) + "; choose a wider share symbol");
      }
      share_code_.emplace(gf::Field(share_bits_), n - 1, kprime);
    }
  }

  ChecksumScheme scheme() const noexcept { return scheme_; }
  std::size_t n() const noexcept { return n_; }
  const CrcParams& crc() const noexcept { return crc_; }
  /// Bits per share: r (replicated) or m' (coded).
  unsigned share_bits() const noexcept {
    return scheme_ == ChecksumScheme::Replicated ? crc_.width : share_bits_;
  }
  /// k' for the coded scheme, 1 for replication.
  std::size_t share_dimension() const noexcept { return share_code_ ? share_code_->dim() : 1; }
  const std::optional<rs::RsCode>& share_code() const noexcept { return share_code_; }

  /// Index of holder among subject's peers (all nodes except subject, ascending).
  static std::size_t peer_position(std::size_t subject, std::size_t holder) {
    if (holder == subject) throw Error(Errc::InvalidParams, "a node holds no share of itself");
    return holder < subject ? holder : holder - 1;
  }

  /// All n-1 shares of one checksum, indexed by peer position.
  std::vector<std::uint32_t> encode(std::uint32_t checksum) const {
    if (scheme_ == ChecksumScheme::Replicated) return std::vector<std::uint32_t>(n_ - 1, checksum);
    const std::vector<gf::Element> codeword = share_code_->encode(split(checksum));
    std::vector<std::uint32_t> out(codeword.size());
    for (std::size_t t = 0; t < codeword.size(); ++t) out[t] = codeword[t].value();
    return out;
  }

  /// Recovers subject's checksum from (holder, share) responses.
  /// Replicated: strict majority, else NoMajority. Coded: error-erasure
  /// decoding of the [n-1, k'] code, else DecodeFailure.
  std::uint32_t recover(std::span<const std::pair<std::size_t, std::uint32_t>> responses,
                        std::size_t subject) const {
    if (responses.empty()) throw Error(Errc::NoMajority, "no checksum shares received");
    if (scheme_ == ChecksumScheme::Replicated) {
      std::map<std::uint32_t, std::size_t> votes;
      for (const auto& [holder, share] : responses) ++votes[share & crc_.mask()];
      for (const auto& [value, count] : votes)
        if (2 * count > responses.size()) return value;
      throw Error(Errc::NoMajority, "no checksum value holds a strict majority of " +
                                        std::to_string(responses.size()) + " shares");
    }
    rs::ProgressiveDecoder decoder(*share_code_);
    const std::uint32_t limit = 1u << share_bits_;
    for (const auto& [holder, share] : responses)
      decoder.absorb(peer_position(subject, holder), gf::Element(share % limit));
    return join(decoder.attempt().message);
  }

  std::vector<gf::Element> split(std::uint32_t checksum) const {
    // Zero-extended to k'*m' bits; symbol 0 carries the most significant bits.
    const std::size_t kprime = share_code_->dim();
    std::vector<gf::Element> symbols(kprime);
    const std::uint64_t value = checksum & crc_.mask();
    for (std::size_t i = 0; i < kprime; ++i) {
      const unsigned shift = static_cast<unsigned>((kprime - 1 - i) * share_bits_);
      symbols[i] = gf::Element(static_cast<std::uint32_t>((value >> shift) & ((1u << share_bits_) - 1)));
    }
    return symbols;
  }

  std::uint32_t join(std::span<const gf::Element> symbols) const {
    std::uint64_t value = 0;
    for (const auto& s : symbols) value = (value << share_bits_) | s.value();
    if ((value >> crc_.width) != 0) throw Error(Errc::DecodeFailure, "decoded checksum padding is nonzero");
    return static_cast<std::uint32_t>(value);
  }

  /// Extra bits stored per node: (n-1) * r or (n-1) * m'.
  std::size_t storage_bits_per_node() const noexcept { return (n_ - 1) * share_bits(); }

 private:
  ChecksumScheme scheme_;
  std::size_t n_;
  CrcParams crc_;
  unsigned share_bits_ = 0;
  std::optional<rs::RsCode> share_code_;
};

/// Checksum of one node's stored symbols.
inline std::uint32_t node_checksum(std::span<const gf::Element> symbols, unsigned m,
                                   const CrcParams& crc = {}) {
  return crc_bits(symbols_to_bits(symbols, m), crc);
}

/// Which checksum shares every node holds: held[j][t] is node j's share of
/// the checksum of its t-th peer (peers ascending, skipping j).
class ChecksumDirectory {
 public:
  ChecksumDirectory(ChecksumCodec codec, std::span<const std::uint32_t> checksums)
      : codec_(std::move(codec)), held_(codec_.n(), std::vector<std::uint32_t>(codec_.n() - 1)) {
    if (checksums.size() != codec_.n()) throw Error(Errc::LengthMismatch, "one checksum per node");
    for (std::size_t subject = 0; subject < codec_.n(); ++subject) {
      const std::vector<std::uint32_t> shares = codec_.encode(checksums[subject]);
      for (std::size_t holder = 0; holder < codec_.n(); ++holder) {
        if (holder == subject) continue;
        held_[holder][peer_slot(holder, subject)] = shares[ChecksumCodec::peer_position(subject, holder)];
      }
    }
  }

  /// Directory assembled from shares read back from storage.
  ChecksumDirectory(ChecksumCodec codec, std::vector<std::vector<std::uint32_t>> held)
      : codec_(std::move(codec)), held_(std::move(held)) {
    if (held_.size() != codec_.n()) throw Error(Errc::LengthMismatch, "one share list per node");
    for (const auto& h : held_)
      if (h.size() != codec_.n() - 1) throw Error(Errc::LengthMismatch, "each node holds n-1 shares");
  }

  const ChecksumCodec& codec() const noexcept { return codec_; }
  std::size_t n() const noexcept { return codec_.n(); }

  std::uint32_t share(std::size_t holder, std::size_t subject) const {
    return held_.at(holder).at(peer_slot(holder, subject));
  }
  void set_share(std::size_t holder, std::size_t subject, std::uint32_t value) {
    held_.at(holder).at(peer_slot(holder, subject)) = value;
  }
  /// Shares held by one node, ordered by subject ascending (skipping itself).
  const std::vector<std::uint32_t>& held_by(std::size_t holder) const { return held_.at(holder); }
  void set_held_by(std::size_t holder, std::vector<std::uint32_t> shares) {
    if (shares.size() != n() - 1) throw Error(Errc::LengthMismatch, "each node holds n-1 shares");
    held_.at(holder) = std::move(shares);
  }

  std::size_t storage_bits_per_node() const noexcept { return codec_.storage_bits_per_node(); }

  /// Rebuilds the shares a lost node held, from every other node's shares.
  std::vector<std::uint32_t> rebuild_held_by(std::size_t lost) const {
    std::vector<std::uint32_t> out(n() - 1);
    for (std::size_t subject = 0; subject < n(); ++subject) {
      if (subject == lost) continue;
      std::vector<std::pair<std::size_t, std::uint32_t>> responses;
      for (std::size_t holder = 0; holder < n(); ++holder)
        if (holder != subject && holder != lost) responses.emplace_back(holder, share(holder, subject));
      const std::uint32_t checksum = codec_.recover(responses, subject);
      out[peer_slot(lost, subject)] = codec_.encode(checksum)[ChecksumCodec::peer_position(subject, lost)];
    }
    return out;
  }

 private:
  static std::size_t peer_slot(std::size_t holder, std::size_t subject) {
    return ChecksumCodec::peer_position(holder, subject);
  }

  ChecksumCodec codec_;
  std::vector<std::vector<std::uint32_t>> held_;
};

inline ChecksumDirectory build_directory(std::span<const std::vector<gf::Element>> node_symbols,
                                         unsigned m, ChecksumCodec codec) {
  std::vector<std::uint32_t> checksums;
  checksums.reserve(node_symbols.size());
  for (const auto& symbols : node_symbols) checksums.push_back(node_checksum(symbols, m, codec.crc()));
  return ChecksumDirectory(std::move(codec), checksums);
}

}  // namespace regen
