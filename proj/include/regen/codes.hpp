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

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "regen/error.hpp"
#include "regen/galois.hpp"
#include "regen/integrity.hpp"
#include "regen/matrix.hpp"
#include "regen/rscode.hpp"

namespace regen {

enum class Family { Msr, Mbr };

constexpr std::string_view to_string(Family f) noexcept { return f == Family::Msr ? "msr" : "mbr"; }

/// What one storage node holds: beta stripes of alpha coded symbols.
struct NodeChunk {
  std::size_t node = 0;  // 0-based position; node "i" in 1-based terms is node + 1
  std::size_t alpha = 0;
  std::vector<gf::Element> symbols;  // stripe-major, beta * alpha

  std::size_t stripes() const noexcept { return alpha == 0 ? 0 : symbols.size() / alpha; }
  std::span<const gf::Element> stripe(std::size_t s) const {
    return std::span<const gf::Element>(symbols).subspan(s * alpha, alpha);
  }
  std::span<gf::Element> stripe(std::size_t s) { return std::span<gf::Element>(symbols).subspan(s * alpha, alpha); }

  friend bool operator==(const NodeChunk&, const NodeChunk&) = default;
};

/// A helper's answer during regeneration: beta projected symbols plus the
/// helper's share of the failed node's checksum.
struct RepairReply {
  std::size_t node = 0;
  std::vector<gf::Element> symbols;
  std::uint32_t share = 0;
};

enum class Outcome { Success, ClusterExhausted, ChecksumUnrecoverable };

constexpr std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Success: return "SUCCESS";
    case Outcome::ClusterExhausted: return "FAIL";
    case Outcome::ChecksumUnrecoverable: return "CHECKSUM_UNRECOVERABLE";
  }
  return "UNKNOWN";
}

struct ReconstructionResult {
  Outcome outcome = Outcome::ClusterExhausted;
  std::vector<gf::Element> message;  // beta * B symbols on success
  std::size_t rounds = 0;            // decode attempts, the fast path included
  bool fast_path = false;            // success came from the k-node path
};

struct RegenerationResult {
  Outcome outcome = Outcome::ClusterExhausted;
  NodeChunk chunk;
  std::size_t rounds = 0;
};

/// Hands out coded chunks of not-yet-contacted nodes, up to `count` per call;
/// an empty answer means nobody else will respond.
template <class S>
concept ChunkSource = requires(S& s, std::size_t count) {
  { s.fetch(count) } -> std::same_as<std::vector<NodeChunk>>;
};

template <class S>
concept RepairSource = requires(S& s, std::size_t count) {
  { s.fetch(count) } -> std::same_as<std::vector<RepairReply>>;
};

template <class C>
concept RegeneratingCode = requires(const C& c, const NodeChunk& chunk, std::size_t i,
                                    std::span<const gf::Element> symbols) {
  { c.family() } -> std::same_as<Family>;
  { c.n() } -> std::convertible_to<std::size_t>;
  { c.k() } -> std::convertible_to<std::size_t>;
  { c.d() } -> std::convertible_to<std::size_t>;
  { c.alpha() } -> std::convertible_to<std::size_t>;
  { c.beta() } -> std::convertible_to<std::size_t>;
  { c.message_symbols() } -> std::convertible_to<std::size_t>;
  { c.field() } -> std::convertible_to<const gf::Field&>;
  { c.repair_code() } -> std::convertible_to<const rs::RsCode&>;
  { c.encode(symbols) } -> std::same_as<std::vector<NodeChunk>>;
  { c.repair_response(chunk, i) } -> std::same_as<std::vector<gf::Element>>;
  { c.stripe_from_repair(i, symbols) } -> std::same_as<std::vector<gf::Element>>;
};

/// Position (row, col) in the information matrix of each message symbol.
using FillMap = std::vector<std::pair<std::size_t, std::size_t>>;

/// Throws InvalidParams unless the map sends 0..B-1 to distinct cells of a
/// rows x cols matrix.
inline void validate_fill_map(const FillMap& map, std::size_t symbols, std::size_t rows, std::size_t cols) {
  if (map.size() != symbols) {
    throw Error(Errc::InvalidParams, "fill map covers " + std::to_string(map.size()) + " of " +
                                         std::to_string(symbols) + " message symbols");
  }
  std::vector<bool> used(rows * cols, false);
  for (const auto& [r, c] : map) {
    if (r >= rows || c >= cols) throw Error(Errc::InvalidParams, "fill map cell out of range");
    if (used[r * cols + c]) throw Error(Errc::InvalidParams, "fill map is not injective");
    used[r * cols + c] = true;
  }
}

/// Builds a fill map from raw (row, col, index) triples, rejecting indices
/// outside 0..B-1 or hit twice.
inline FillMap fill_map_from_indices(
    const std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>>& triples, std::size_t symbols) {
  FillMap map(symbols, {SIZE_MAX, SIZE_MAX});
  for (const auto& [r, c, idx] : triples) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= symbols) {
      throw Error(Errc::InvalidParams, "message index " + std::to_string(idx) + " outside 0.." +
                                           std::to_string(symbols - 1));
    }
    if (map[idx].first != SIZE_MAX) throw Error(Errc::InvalidParams, "message index assigned twice");
    map[idx] = {r, c};
  }
  for (const auto& cell : map)
    if (cell.first == SIZE_MAX) throw Error(Errc::InvalidParams, "message index left unassigned");
  return map;
}

/// Generic repair driver. The helpers project their chunks onto the failed
/// node's repair vector; each stripe's projections form a codeword of the
/// [n, d] repair code, decoded progressively while two more helpers are
/// added per round until the rebuilt chunk matches the recovered checksum.
template <RegeneratingCode Code, RepairSource Source>
RegenerationResult regenerate(const Code& code, std::size_t failed, const ChecksumCodec& checksums,
                              Source& source) {
  if (failed >= code.n()) throw Error(Errc::InvalidParams, "failed node out of range");
  std::vector<rs::ProgressiveDecoder> rows(code.beta(), rs::ProgressiveDecoder(code.repair_code()));
  std::vector<std::pair<std::size_t, std::uint32_t>> shares;
  RegenerationResult result;
  bool checksum_seen = false;

  auto absorb = [&](const std::vector<RepairReply>& replies) {
    for (const RepairReply& r : replies) {
      if (r.node == failed) throw Error(Errc::SelfRepair, "failed node cannot help repair itself");
      if (r.symbols.size() != code.beta()) throw Error(Errc::LengthMismatch, "repair reply size");
      for (std::size_t s = 0; s < code.beta(); ++s) rows[s].absorb(r.node, r.symbols[s]);
      shares.emplace_back(r.node, r.share);
    }
  };

  absorb(source.fetch(code.d()));
  while (true) {
    ++result.rounds;
    try {
      const std::uint32_t expected = checksums.recover(shares, failed);
      checksum_seen = true;
      NodeChunk chunk{failed, code.alpha(), {}};
      chunk.symbols.reserve(code.alpha() * code.beta());
      for (auto& row : rows) {
        const std::vector<gf::Element> stripe = code.stripe_from_repair(failed, row.attempt().message);
        chunk.symbols.insert(chunk.symbols.end(), stripe.begin(), stripe.end());
      }
      if (node_checksum(chunk.symbols, code.field().m(), checksums.crc()) == expected) {
        result.outcome = Outcome::Success;
        result.chunk = std::move(chunk);
        return result;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::DecodeFailure && e.code() != Errc::NoMajority) throw;
    }
    const std::vector<RepairReply> more = source.fetch(2);
    if (more.empty()) {
      result.outcome = checksum_seen ? Outcome::ClusterExhausted : Outcome::ChecksumUnrecoverable;
      return result;
    }
    absorb(more);
  }
}

}  // namespace regen
