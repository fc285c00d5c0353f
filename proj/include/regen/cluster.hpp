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
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "regen/bits.hpp"
#include "regen/codes.hpp"
#include "regen/crc.hpp"
#include "regen/error.hpp"
#include "regen/galois.hpp"
#include "regen/integrity.hpp"
#include "regen/layout.hpp"

namespace regen::sim {

using gf::Element;

enum class NodeStatus { Healthy, Crashed, Byzantine };

constexpr std::string_view to_string(NodeStatus s) noexcept {
  switch (s) {
    case NodeStatus::Healthy: return "healthy";
    case NodeStatus::Crashed: return "crashed";
    case NodeStatus::Byzantine: return "byzantine";
  }
  return "unknown";
}

/// Each stored symbol, and each held checksum share, is replaced with
/// probability `flip_rate` by a uniformly random different value.
struct RandomCorruption {
  double flip_rate = 1.0;
};

/// Colluders shift coordinate `row` of every stripe by a common codeword
/// ỹ·G of the row code whose polynomial vanishes on the first dim-1 honest
/// nodes, with per-stripe scalars chosen so the forged file keeps a valid
/// payload CRC.
struct ConsistentForgery {
  std::size_t row = 0;
};

using Strategy = std::variant<RandomCorruption, ConsistentForgery>;

struct FaultPlan {
  std::vector<std::size_t> crashes;
  std::vector<std::size_t> byzantine;
  Strategy strategy = RandomCorruption{};
  std::uint64_t seed = 1;
};

/// Untried nodes in a seeded uniformly random order.
struct SeededRandom {
  std::uint64_t seed = 1;
};
/// Compromised nodes first, each group in seeded random order.
struct Adversarial {
  std::uint64_t seed = 1;
};
/// Exactly this order; nodes not listed are never contacted.
struct FixedOrder {
  std::vector<std::size_t> order;
};

using AccessPolicy = std::variant<SeededRandom, Adversarial, FixedOrder>;

struct RunMetrics {
  std::size_t nodes_contacted = 0;
  std::size_t symbols_downloaded = 0;
  std::size_t checksum_symbols_downloaded = 0;
  std::size_t checksum_bits_downloaded = 0;
  std::size_t decode_rounds = 0;
  Outcome outcome = Outcome::ClusterExhausted;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct ReconstructionRun {
  ReconstructionResult result;
  RunMetrics metrics;
  std::vector<std::uint8_t> payload;  // filled on success
  bool correct = false;               // success and equal to the stored file
};

struct RegenerationRun {
  RegenerationResult result;
  RunMetrics metrics;
  bool exact = false;  // success and bit-identical to the original chunk
};

template <RegeneratingCode Code>
class Cluster {
 public:
  /// Packs the payload with its CRC, encodes it and places chunks and
  /// checksum shares on all n nodes. Throws PayloadTooLarge.
  static Cluster store(Code code, std::span<const std::uint8_t> payload, ChecksumCodec checksums) {
    if (checksums.n() != code.n()) throw Error(Errc::InvalidParams, "checksum directory size differs from n");
    MessageLayout layout(code.field().m(), code.message_symbols(), code.beta(), checksums.crc());
    std::vector<Element> message = layout.pack(payload);
    std::vector<NodeChunk> chunks = code.encode(message);
    std::vector<std::vector<Element>> symbols;
    for (const auto& c : chunks) symbols.push_back(c.symbols);
    ChecksumDirectory directory = build_directory(symbols, code.field().m(), checksums);
    return Cluster(std::move(code), std::move(layout), std::move(message), payload.size(), std::move(chunks),
                   std::move(directory));
  }

  const Code& code() const noexcept { return code_; }
  const MessageLayout& layout() const noexcept { return layout_; }
  const ChecksumDirectory& directory() const noexcept { return directory_; }
  const ChecksumCodec& checksums() const noexcept { return directory_.codec(); }
  std::size_t n() const noexcept { return code_.n(); }
  std::size_t payload_bytes() const noexcept { return payload_bytes_; }
  const std::vector<Element>& message() const noexcept { return message_; }

  const NodeChunk& chunk(std::size_t node) const { return chunks_.at(node); }
  const NodeChunk& original_chunk(std::size_t node) const { return pristine_.at(node); }
  NodeStatus status(std::size_t node) const { return status_.at(node); }
  std::vector<std::size_t> nodes_with(NodeStatus s) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n(); ++j)
      if (status_[j] == s) out.push_back(j);
    return out;
  }

  /// Direct overwrite of a node's stored symbols, e.g. from a chunk file.
  void overwrite(std::size_t node, std::vector<Element> symbols) {
    if (symbols.size() != chunks_.at(node).symbols.size()) throw Error(Errc::LengthMismatch, "chunk size");
    chunks_[node].symbols = std::move(symbols);
  }

  /// Applies crashes and Byzantine rewrites. Throws OverlappingSets when a
  /// node is in both sets, InvalidParams for bad indices.
  void inject(const FaultPlan& plan) {
    std::vector<bool> crash(n(), false), byz(n(), false);
    for (std::size_t j : plan.crashes) {
      if (j >= n()) throw Error(Errc::InvalidParams, "crash index out of range");
      crash[j] = true;
    }
    for (std::size_t j : plan.byzantine) {
      if (j >= n()) throw Error(Errc::InvalidParams, "byzantine index out of range");
      if (crash[j]) throw Error(Errc::OverlappingSets, "node " + std::to_string(j + 1) + " both crashed and byzantine");
      byz[j] = true;
    }
    std::vector<std::size_t> colluders;
    for (std::size_t j = 0; j < n(); ++j) {
      if (crash[j]) status_[j] = NodeStatus::Crashed;
      if (byz[j]) {
        status_[j] = NodeStatus::Byzantine;
        colluders.push_back(j);
      }
    }
    std::mt19937_64 rng(plan.seed);
    if (const auto* rc = std::get_if<RandomCorruption>(&plan.strategy)) {
      for (std::size_t j : colluders) corrupt(j, rc->flip_rate, rng);
    } else {
      forge(colluders, std::get<ConsistentForgery>(plan.strategy), rng);
    }
  }

  /// Puts a regenerated chunk back and rebuilds the shares the node holds.
  void restore(std::size_t node, const NodeChunk& chunk) {
    if (chunk.node != node) throw Error(Errc::InvalidParams, "chunk belongs to another node");
    chunks_.at(node) = chunk;
    directory_.set_held_by(node, directory_.rebuild_held_by(node));
    status_[node] = NodeStatus::Healthy;
  }

  /// Order in which a collector (or newcomer, excluding `skip`) contacts
  /// nodes. Crashed nodes never appear.
  std::vector<std::size_t> access_order(const AccessPolicy& policy, std::optional<std::size_t> skip = {}) const {
    auto live = [&](std::size_t j) { return status_[j] != NodeStatus::Crashed && (!skip || j != *skip); };
    std::vector<std::size_t> order;
    if (const auto* fixed = std::get_if<FixedOrder>(&policy)) {
      std::vector<bool> seen(n(), false);
      for (std::size_t j : fixed->order) {
        if (j >= n()) throw Error(Errc::InvalidParams, "access order index out of range");
        if (seen[j]) throw Error(Errc::DuplicatePosition, "node listed twice in access order");
        seen[j] = true;
        if (live(j)) order.push_back(j);
      }
      return order;
    }
    std::vector<std::size_t> bad, good;
    for (std::size_t j = 0; j < n(); ++j) {
      if (!live(j)) continue;
      (status_[j] == NodeStatus::Byzantine ? bad : good).push_back(j);
    }
    if (const auto* r = std::get_if<SeededRandom>(&policy)) {
      order = good;
      order.insert(order.end(), bad.begin(), bad.end());
      std::sort(order.begin(), order.end());
      std::mt19937_64 rng(r->seed);
      std::shuffle(order.begin(), order.end(), rng);
      return order;
    }
    std::mt19937_64 rng(std::get<Adversarial>(policy).seed);
    std::shuffle(bad.begin(), bad.end(), rng);
    std::shuffle(good.begin(), good.end(), rng);
    order = bad;
    order.insert(order.end(), good.begin(), good.end());
    return order;
  }

  ReconstructionRun run_reconstruction(const AccessPolicy& policy) const {
    ChunkFeed feed{this, access_order(policy), 0, {}};
    ReconstructionRun run;
    run.result = code_.reconstruct(layout_, feed);
    run.metrics = feed.metrics;
    run.metrics.decode_rounds = run.result.rounds;
    run.metrics.outcome = run.result.outcome;
    if (run.result.outcome == Outcome::Success) {
      run.payload = layout_.unpack(run.result.message, payload_bytes_);
      run.correct = run.result.message == message_;
    }
    return run;
  }

  RegenerationRun run_regeneration(std::size_t failed, const AccessPolicy& policy) const {
    if (failed >= n()) throw Error(Errc::InvalidParams, "failed node out of range");
    RepairFeed feed{this, access_order(policy, failed), 0, failed, {}};
    RegenerationRun run;
    run.result = regenerate(code_, failed, checksums(), feed);
    run.metrics = feed.metrics;
    run.metrics.decode_rounds = run.result.rounds;
    run.metrics.outcome = run.result.outcome;
    run.exact = run.result.outcome == Outcome::Success && run.result.chunk == pristine_[failed];
    return run;
  }

 private:
  struct ChunkFeed {
    const Cluster* cluster;
    std::vector<std::size_t> order;
    std::size_t next;
    RunMetrics metrics;

    std::vector<NodeChunk> fetch(std::size_t count) {
      std::vector<NodeChunk> out;
      while (count-- > 0 && next < order.size()) {
        const NodeChunk& c = cluster->chunks_[order[next++]];
        out.push_back(c);
        ++metrics.nodes_contacted;
        metrics.symbols_downloaded += c.symbols.size();
      }
      return out;
    }
  };

  struct RepairFeed {
    const Cluster* cluster;
    std::vector<std::size_t> order;
    std::size_t next;
    std::size_t failed;
    RunMetrics metrics;

    std::vector<RepairReply> fetch(std::size_t count) {
      std::vector<RepairReply> out;
      while (count-- > 0 && next < order.size()) {
        const std::size_t j = order[next++];
        RepairReply reply{j, cluster->code_.repair_response(cluster->chunks_[j], failed),
                          cluster->directory_.share(j, failed)};
        ++metrics.nodes_contacted;
        metrics.symbols_downloaded += reply.symbols.size();
        ++metrics.checksum_symbols_downloaded;
        metrics.checksum_bits_downloaded += cluster->checksums().share_bits();
        out.push_back(std::move(reply));
      }
      return out;
    }
  };

  Cluster(Code code, MessageLayout layout, std::vector<Element> message, std::size_t payload_bytes,
          std::vector<NodeChunk> chunks, ChecksumDirectory directory)
      : code_(std::move(code)),
        layout_(std::move(layout)),
        message_(std::move(message)),
        payload_bytes_(payload_bytes),
        chunks_(chunks),
        pristine_(std::move(chunks)),
        directory_(std::move(directory)),
        status_(code_.n(), NodeStatus::Healthy) {}

  void corrupt(std::size_t node, double rate, std::mt19937_64& rng) {
    std::bernoulli_distribution flip(rate);
    const std::uint32_t size = code_.field().size();
    std::uniform_int_distribution<std::uint32_t> other(1, size - 1);
    for (auto& s : chunks_[node].symbols)
      if (flip(rng)) s = Element(s.value() ^ other(rng));
    const unsigned bits = checksums().share_bits();
    const std::uint64_t limit = std::uint64_t{1} << bits;
    std::uniform_int_distribution<std::uint64_t> other_share(1, limit - 1);
    std::vector<std::uint32_t> held = directory_.held_by(node);
    for (auto& v : held)
      if (flip(rng)) v = static_cast<std::uint32_t>(v ^ other_share(rng));
    directory_.set_held_by(node, std::move(held));
  }

  void forge(const std::vector<std::size_t>& colluders, const ConsistentForgery& f, std::mt19937_64& rng) {
    if (colluders.empty()) return;
    const gf::Field& field = code_.field();
    const std::size_t alpha = code_.alpha(), beta = code_.beta();
    if (f.row >= alpha) throw Error(Errc::InvalidParams, "forged row exceeds alpha");
    // Degree bound of the forged row's polynomial: the row code's dimension.
    const std::size_t dim = code_.family() == Family::Mbr ? code_.k() : code_.d();
    std::vector<bool> colluding(n(), false);
    for (std::size_t j : colluders) colluding[j] = true;
    std::vector<std::size_t> zeros;
    for (std::size_t j = 0; j < n() && zeros.size() + 1 < dim; ++j)
      if (!colluding[j]) zeros.push_back(j);
    if (zeros.size() + 1 < dim) throw Error(Errc::InvalidParams, "too few honest nodes to anchor the forgery");

    // p(x) = prod over zeros of (x - x_z), coefficients low to high.
    std::vector<Element> p{Element(1)};
    for (std::size_t z : zeros) {
      const Element xz = code_.repair_code().point(z);
      p.push_back(Element{});
      for (std::size_t j = p.size() - 1; j > 0; --j) p[j] = p[j - 1] + field.mul(xz, p[j]);
      p[0] = field.mul(xz, p[0]);
    }

    const std::vector<std::uint32_t> mu = crc_neutral_scalars(p, f.row, rng);
    for (std::size_t j : colluders) {
      const Element px = gf::eval_poly(field, p, code_.repair_code().point(j));
      for (std::size_t s = 0; s < beta; ++s)
        chunks_[j].symbols[s * alpha + f.row] += field.mul(Element(mu[s]), px);
    }
  }

  // Message-symbol difference produced when stripe s's row `row` of U shifts
  // by mu * p.
  std::vector<Element> message_delta(const std::vector<Element>& p, std::size_t row,
                                     std::span<const std::uint32_t> mu) const {
    const gf::Field& field = code_.field();
    const std::size_t b = code_.message_symbols();
    std::vector<Element> delta(b * code_.beta());
    const FillMap& fill = code_.fill_map();
    for (std::size_t s = 0; s < code_.beta(); ++s) {
      if (mu[s] == 0) continue;
      for (std::size_t idx = 0; idx < b; ++idx) {
        const auto [r, c] = fill[idx];
        if (r == row && c < p.size()) delta[s * b + idx] = field.mul(Element(mu[s]), p[c]);
      }
    }
    return delta;
  }

  // Residue of a symbol difference: zero iff adding it keeps a CRC-valid
  // file CRC-valid.
  std::uint32_t residue(const std::vector<Element>& delta) const {
    const CrcParams& crc = layout_.crc();
    const BitSequence bits = symbols_to_bits(delta, code_.field().m());
    const std::size_t data = bits.size() - crc.width;
    const std::span<const std::uint8_t> all(bits);
    const BitSequence zero(data, 0);
    return crc_bits(all.first(data), crc) ^ crc_bits(zero, crc) ^ bits_to_checksum(all.subspan(data), crc);
  }

  // Random nonzero element of the kernel of mu -> residue(delta(mu)).
  std::vector<std::uint32_t> crc_neutral_scalars(const std::vector<Element>& p, std::size_t row,
                                                 std::mt19937_64& rng) const {
    const unsigned m = code_.field().m();
    const std::size_t vars = code_.beta() * m;
    std::vector<std::uint32_t> image(vars);
    std::vector<std::uint32_t> mu(code_.beta(), 0);
    for (std::size_t v = 0; v < vars; ++v) {
      mu.assign(code_.beta(), 0);
      mu[v / m] = 1u << (v % m);
      image[v] = residue(message_delta(p, row, mu));
    }
    // Gaussian elimination over GF(2): columns are variables, rows CRC bits.
    const unsigned width = layout_.crc().width;
    std::vector<std::size_t> pivot_col;
    std::vector<std::uint32_t> cols = image;
    std::vector<bool> is_pivot(vars, false);
    std::vector<std::vector<std::uint8_t>> combo(vars, std::vector<std::uint8_t>(vars, 0));
    for (std::size_t v = 0; v < vars; ++v) combo[v][v] = 1;
    std::vector<std::size_t> pivot_of_bit(width, SIZE_MAX);
    for (std::size_t v = 0; v < vars; ++v) {
      for (unsigned bit = 0; bit < width && cols[v] != 0; ++bit) {
        if (!((cols[v] >> bit) & 1u)) continue;
        const std::size_t pv = pivot_of_bit[bit];
        if (pv == SIZE_MAX) {
          pivot_of_bit[bit] = v;
          is_pivot[v] = true;
          break;
        }
        cols[v] ^= cols[pv];
        for (std::size_t t = 0; t < vars; ++t) combo[v][t] ^= combo[pv][t];
      }
    }
    std::vector<std::size_t> free_vars;
    for (std::size_t v = 0; v < vars; ++v)
      if (!is_pivot[v]) free_vars.push_back(v);
    if (free_vars.empty())
      throw Error(Errc::InvalidParams, "no CRC-neutral forgery exists; need m * beta > r");
    std::vector<std::uint8_t> pick(vars, 0);
    std::bernoulli_distribution coin(0.5);
    bool any = false;
    while (!any) {
      pick.assign(vars, 0);
      for (std::size_t v : free_vars) {
        if (!coin(rng)) continue;
        any = true;
        for (std::size_t t = 0; t < vars; ++t) pick[t] ^= combo[v][t];
      }
      if (any && std::all_of(pick.begin(), pick.end(), [](std::uint8_t b) { return b == 0; })) any = false;
    }
    mu.assign(code_.beta(), 0);
    for (std::size_t v = 0; v < vars; ++v)
      if (pick[v]) mu[v / m] ^= 1u << (v % m);
    return mu;
  }

  Code code_;
  MessageLayout layout_;
  std::vector<Element> message_;
  std::size_t payload_bytes_;
  std::vector<NodeChunk> chunks_;
  std::vector<NodeChunk> pristine_;
  ChecksumDirectory directory_;
  std::vector<NodeStatus> status_;
};

}  // namespace regen::sim
