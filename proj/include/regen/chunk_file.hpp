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
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "regen/codes.hpp"
#include "regen/crc.hpp"
#include "regen/error.hpp"
#include "regen/galois.hpp"
#include "regen/integrity.hpp"

namespace regen::io {

/// On-disk chunk. All integers big-endian.
///
///   "RGEN" | version u8 | family u8 | m u8 | prim_poly u32 | generator u32
///   | n u16 | k u16 | d u16 | beta u32 | r u8 | scheme u8 | m' u8
///   | node u16 (1-based) | payload_bytes u64
///   | beta * alpha symbols, ceil(m/8) bytes each
///   | n-1 checksum shares, ceil(share_bits/8) bytes each
struct ChunkHeader {
  Family family = Family::Msr;
  gf::FieldParams field;
  std::uint16_t n = 0, k = 0, d = 0;
  std::uint32_t beta = 1;
  std::uint8_t r = 32;
  ChecksumScheme scheme = ChecksumScheme::Replicated;
  std::uint8_t share_bits = 0;  // 0 for replicated
  std::uint16_t node = 1;
  std::uint64_t payload_bytes = 0;

  std::size_t alpha() const noexcept { return family == Family::Msr ? std::size_t(d) - k + 1 : d; }
  unsigned share_width() const noexcept { return scheme == ChecksumScheme::Replicated ? r : share_bits; }
  /// Same stored file: everything but the node index.
  bool same_file(const ChunkHeader& o) const noexcept {
    return family == o.family && field.m == o.field.m && field.prim_poly == o.field.prim_poly &&
           field.generator == o.field.generator && n == o.n && k == o.k && d == o.d && beta == o.beta &&
           r == o.r && scheme == o.scheme && share_bits == o.share_bits && payload_bytes == o.payload_bytes;
  }
};

struct ChunkFile {
  ChunkHeader header;
  std::vector<gf::Element> symbols;
  std::vector<std::uint32_t> shares;
};

inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 4 + 1 + 1 + 1 + 4 + 4 + 2 + 2 + 2 + 4 + 1 + 1 + 1 + 2 + 8;

namespace detail {

inline void put(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned bytes) {
  for (unsigned i = bytes; i-- > 0;) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}
  std::uint64_t get(unsigned bytes) {
    if (pos_ + bytes > data_.size()) throw Error(Errc::MalformedChunk, "chunk file is truncated");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bytes; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline unsigned byte_width(unsigned bits) { return (bits + 7) / 8; }

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const ChunkFile& f) {
  const ChunkHeader& h = f.header;
  if (f.symbols.size() != h.alpha() * h.beta) throw Error(Errc::LengthMismatch, "chunk holds beta * alpha symbols");
  if (f.shares.size() + 1 != h.n) throw Error(Errc::LengthMismatch, "chunk holds n - 1 checksum shares");
  std::vector<std::uint8_t> out{'R', 'G', 'E', 'N'};
  detail::put(out, kFormatVersion, 1);
  detail::put(out, h.family == Family::Msr ? 0 : 1, 1);
  detail::put(out, h.field.m, 1);
  detail::put(out, h.field.prim_poly, 4);
  detail::put(out, h.field.generator, 4);
  detail::put(out, h.n, 2);
  detail::put(out, h.k, 2);
  detail::put(out, h.d, 2);
  detail::put(out, h.beta, 4);
  detail::put(out, h.r, 1);
  detail::put(out, h.scheme == ChecksumScheme::Replicated ? 0 : 1, 1);
  detail::put(out, h.share_bits, 1);
  detail::put(out, h.node, 2);
  detail::put(out, h.payload_bytes, 8);
  const unsigned sym = detail::byte_width(h.field.m);
  for (const auto& s : f.symbols) detail::put(out, s.value(), sym);
  const unsigned sh = detail::byte_width(h.share_width());
  for (std::uint32_t v : f.shares) detail::put(out, v, sh);
  return out;
}

/// Throws MalformedChunk on any header or size inconsistency.
inline ChunkFile parse(std::span<const std::uint8_t> data) {
  auto bad = [](const std::string& why) { return Error(Errc::MalformedChunk, why); };
  if (data.size() < kHeaderBytes) throw bad("chunk file shorter than its header");
  if (data[0] != 'R' || data[1] != 'G' || data[2] != 'E' || data[3] != 'N') throw bad("bad magic");
  detail::Reader rd(data.subspan(4));
  ChunkFile f;
  ChunkHeader& h = f.header;
  if (rd.get(1) != kFormatVersion) throw bad("unsupported format version");
  const auto family = rd.get(1);
  if (family > 1) throw bad("unknown code family");
  h.family = family == 0 ? Family::Msr : Family::Mbr;
  h.field.m = static_cast<unsigned>(rd.get(1));
  h.field.prim_poly = static_cast<std::uint32_t>(rd.get(4));
  h.field.generator = static_cast<std::uint32_t>(rd.get(4));
  if (h.field.m < 2 || h.field.m > 16) throw bad("field degree outside [2, 16]");
  h.n = static_cast<std::uint16_t>(rd.get(2));
  h.k = static_cast<std::uint16_t>(rd.get(2));
  h.d = static_cast<std::uint16_t>(rd.get(2));
  h.beta = static_cast<std::uint32_t>(rd.get(4));
  h.r = static_cast<std::uint8_t>(rd.get(1));
  const auto scheme = rd.get(1);
  if (scheme > 1) throw bad("unknown checksum scheme");
  h.scheme = scheme == 0 ? ChecksumScheme::Replicated : ChecksumScheme::RsCoded;
  h.share_bits = static_cast<std::uint8_t>(rd.get(1));
  h.node = static_cast<std::uint16_t>(rd.get(2));
  h.payload_bytes = rd.get(8);
  if (h.k < 1 || h.k > h.d || h.d + 1 > h.n) throw bad("inconsistent n, k, d");
  if (h.family == Family::Msr && h.d != 2 * h.k - 2) throw bad("MSR chunk with d != 2k - 2");
  if (h.beta == 0) throw bad("beta is zero");
  if (h.r < 1 || h.r > 32) throw bad("CRC width outside [1, 32]");
  if (h.scheme == ChecksumScheme::RsCoded ? (h.share_bits < 2 || h.share_bits > 16) : h.share_bits != 0)
    throw bad("share width does not match the checksum scheme");
  if (h.node < 1 || h.node > h.n) throw bad("node index outside [1, n]");
  const unsigned sym = detail::byte_width(h.field.m);
  const unsigned sh = detail::byte_width(h.share_width());
  const std::uint64_t body = std::uint64_t(h.alpha()) * h.beta * sym + std::uint64_t(h.n - 1) * sh;
  if (rd.remaining() != body) throw bad("body size does not match the header");
  const std::uint32_t mask = (1u << h.field.m) - 1;
  f.symbols.reserve(h.alpha() * h.beta);
  for (std::size_t i = 0; i < h.alpha() * h.beta; ++i)
    f.symbols.emplace_back(static_cast<std::uint32_t>(rd.get(sym)) & mask);
  const std::uint64_t share_mask = (std::uint64_t{1} << h.share_width()) - 1;
  for (std::size_t i = 0; i + 1 < h.n; ++i) f.shares.push_back(static_cast<std::uint32_t>(rd.get(sh) & share_mask));
  return f;
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Usage, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Usage, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::Usage, "short write to " + path);
}

}  // namespace regen::io
