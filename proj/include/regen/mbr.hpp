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
#include <tuple>
#include <vector>

#include "regen/codes.hpp"
#include "regen/error.hpp"
#include "regen/galois.hpp"
#include "regen/layout.hpp"
#include "regen/matrix.hpp"
#include "regen/rscode.hpp"

namespace regen::mbr {

using gf::Element;

struct MbrParams {
  std::size_t n = 6;
  std::size_t k = 3;
  std::size_t d = 4;
  std::size_t beta = 1;
  gf::FieldParams field = gf::FieldParams::defaults(4);
};

/// B = kd - k(k-1)/2.
constexpr std::size_t message_size_for(std::size_t k, std::size_t d) noexcept { return k * d - k * (k - 1) / 2; }

/// Message index of each cell of A1's upper triangle (1 <= i <= j <= k) and
/// of A2 (rows k+1..d of U, columns 1..k), as 0-based (row, col, index).
/// The A2 formula (i-k-1)k + k(k+1)/2 + j counts from 1; `offset_fix`
/// subtracts the 1 so indices land in 0..B-1.
inline std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> fill_indices(std::size_t k, std::size_t d,
                                                                                     bool offset_fix = true) {
  std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> out;
  const auto kk = static_cast<std::int64_t>(k);
  for (std::int64_t i = 1; i <= kk; ++i)
    for (std::int64_t j = i; j <= kk; ++j) out.emplace_back(i - 1, j - 1, (i - 1) * (kk + 1) - i * (i + 1) / 2 + j);
  for (std::int64_t i = kk + 1; i <= static_cast<std::int64_t>(d); ++i)
    for (std::int64_t j = 1; j <= kk; ++j)
      out.emplace_back(i - 1, j - 1, (i - kk - 1) * kk + kk * (kk + 1) / 2 + j - (offset_fix ? 1 : 0));
  return out;
}

class MbrCode {
 public:
  explicit MbrCode(const MbrParams& params)
      : params_(params),
        field_(params.field),
        code_(field_, checked_n(params, field_), params.d),
        data_code_(field_, params.n, params.k) {
    fill_ = fill_map_from_indices(fill_indices(k(), d()), message_symbols());
    validate_fill_map(fill_, message_symbols(), d(), d());
  }

  MbrCode(gf::Field field, std::size_t n, std::size_t k, std::size_t d, std::size_t beta = 1)
      : MbrCode(MbrParams{n, k, d, beta, field.params()}) {}

  Family family() const noexcept { return Family::Mbr; }
  const MbrParams& params() const noexcept { return params_; }
  std::size_t n() const noexcept { return params_.n; }
  std::size_t k() const noexcept { return params_.k; }
  std::size_t d() const noexcept { return params_.d; }
  std::size_t alpha() const noexcept { return params_.d; }
  std::size_t beta() const noexcept { return params_.beta; }
  std::size_t message_symbols() const noexcept { return message_size_for(params_.k, params_.d); }
  const gf::Field& field() const noexcept { return field_; }
  /// [n, d] code: rows of U·G and repair responses.
  const rs::RsCode& repair_code() const noexcept { return code_; }
  /// [n, k] code used by both reconstruction phases.
  const rs::RsCode& data_code() const noexcept { return data_code_; }
  const FillMap& fill_map() const noexcept { return fill_; }

  /// Column i of G: [1, x_i, ..., x_i^(d-1)].
  std::vector<Element> repair_vector(std::size_t node) const {
    std::vector<Element> v(d());
    Element acc(1);
    for (auto& e : v) {
      e = acc;
      acc = field_.mul(acc, code_.point(node));
    }
    return v;
  }

  /// U = [[A1, A2^T], [A2, 0]], d x d symmetric.
  Matrix build_u(std::span<const Element> message) const {
    if (message.size() != message_symbols()) {
      throw Error(Errc::LengthMismatch, "MBR stripe needs B = " + std::to_string(message_symbols()) + " symbols");
    }
    Matrix u(d(), d());
    for (std::size_t idx = 0; idx < fill_.size(); ++idx) {
      const auto [r, c] = fill_[idx];
      u(r, c) = message[idx];
      u(c, r) = message[idx];
    }
    return u;
  }

  std::vector<Element> read_u(const Matrix& u) const {
    if (u.rows() != d() || u.cols() != d()) throw Error(Errc::LengthMismatch, "U has the wrong shape");
    std::vector<Element> message(fill_.size());
    for (std::size_t idx = 0; idx < fill_.size(); ++idx) message[idx] = u(fill_[idx].first, fill_[idx].second);
    return message;
  }

  std::vector<std::vector<Element>> encode_stripe(const Matrix& u) const {
    std::vector<std::vector<Element>> columns(n(), std::vector<Element>(d()));
    for (std::size_t r = 0; r < d(); ++r) {
      const std::vector<Element> row = code_.encode(u.row(r));
      for (std::size_t j = 0; j < n(); ++j) columns[j][r] = row[j];
    }
    return columns;
  }

  std::vector<NodeChunk> encode(std::span<const Element> message) const {
    const std::size_t b = message_symbols();
    if (message.size() != b * beta()) {
      throw Error(Errc::LengthMismatch, "expected beta * B = " + std::to_string(b * beta()) + " symbols");
    }
    std::vector<NodeChunk> chunks(n());
    for (std::size_t j = 0; j < n(); ++j) chunks[j] = NodeChunk{j, d(), {}};
    for (std::size_t s = 0; s < beta(); ++s) {
      const auto columns = encode_stripe(build_u(message.subspan(s * b, b)));
      for (std::size_t j = 0; j < n(); ++j)
        chunks[j].symbols.insert(chunks[j].symbols.end(), columns[j].begin(), columns[j].end());
    }
    return chunks;
  }

  /// Two-phase decode of whatever chunks are given: the last d-k rows of Y
  /// under the [n,k] code give A2, its contribution E is removed from the
  /// first k rows, which then decode to A1. Throws DecodeFailure.
  std::vector<Element> decode(std::span<const NodeChunk> chunks) const {
    for (const NodeChunk& c : chunks) check_chunk(c);
    std::vector<Element> message;
    message.reserve(message_symbols() * beta());
    for (std::size_t s = 0; s < beta(); ++s) {
      const std::vector<Element> part = decode_stripe(chunks, s);
      message.insert(message.end(), part.begin(), part.end());
    }
    return message;
  }

  /// Collector protocol: start from k chunks, two more per round until the
  /// payload CRC holds or no node is left.
  template <ChunkSource Source>
  ReconstructionResult reconstruct(const MessageLayout& layout, Source& source) const {
    if (layout.m() != field_.m() || layout.symbols_per_stripe() != message_symbols() || layout.stripes() != beta())
      throw Error(Errc::InvalidParams, "message layout does not match the code");
    ReconstructionResult result;
    std::vector<NodeChunk> held = source.fetch(k());
    bool fresh = true;
    while (true) {
      if (fresh) {
        ++result.rounds;
        try {
          std::vector<Element> message = decode(held);
          if (layout.verify(message)) {
            result.outcome = Outcome::Success;
            result.message = std::move(message);
            result.fast_path = result.rounds == 1;
            return result;
          }
        } catch (const Error& e) {
          if (e.code() != Errc::DecodeFailure) throw;
        }
      }
      const std::vector<NodeChunk> more = source.fetch(2);
      if (more.empty()) break;
      held.insert(held.end(), more.begin(), more.end());
      fresh = true;
    }
    result.outcome = Outcome::ClusterExhausted;
    return result;
  }

  std::vector<Element> repair_response(const NodeChunk& chunk, std::size_t failed) const {
    if (chunk.node == failed) throw Error(Errc::SelfRepair, "node cannot help repair itself");
    check_chunk(chunk);
    const std::vector<Element> g = repair_vector(failed);
    std::vector<Element> out(beta());
    for (std::size_t s = 0; s < beta(); ++s) out[s] = dot(field_, g, chunk.stripe(s));
    return out;
  }

  /// U symmetric, so (g_i·U)^T = U·g_i^T is the stored column itself.
  std::vector<Element> stripe_from_repair(std::size_t, std::span<const Element> gu) const {
    if (gu.size() != d()) throw Error(Errc::LengthMismatch, "g_i·U must have d entries");
    return {gu.begin(), gu.end()};
  }

  void check_chunk(const NodeChunk& c) const {
    if (c.node >= n()) throw Error(Errc::InvalidParams, "node index out of range");
    if (c.alpha != d() || c.symbols.size() != d() * beta())
      throw Error(Errc::LengthMismatch, "chunk does not hold beta * d symbols");
  }

 private:
  static std::size_t checked_n(const MbrParams& p, const gf::Field& f) {
    if (p.k == 0 || p.k > p.d) throw Error(Errc::InvalidParams, "MBR needs 1 <= k <= d");
    if (p.n < 2 || p.d > p.n - 1) throw Error(Errc::InvalidParams, "need k <= d <= n - 1");
    if (p.beta == 0) throw Error(Errc::InvalidParams, "beta must be positive");
    if (p.n > f.group_order()) throw Error(Errc::InvalidParams, "n exceeds 2^m - 1");
    return p.n;
  }

  std::vector<Element> decode_stripe(std::span<const NodeChunk> chunks, std::size_t stripe) const {
    const std::size_t kk = k();
    Matrix u(d(), d());
    // Phase 1: rows k..d-1 carry [A2 | 0].
    std::vector<std::vector<Element>> a2(d() - kk);
    for (std::size_t q = 0; q < d() - kk; ++q) {
      rs::ReceivedWord word(n());
      for (const NodeChunk& c : chunks) word.set(c.node, c.stripe(stripe)[kk + q]);
      a2[q] = rs::decode_error_erasure(data_code_, word).message;
    }
    // Phase 2: Y'_r = Y_r - sum_q A2[q][r] x^(k+q), then decode A1 row r.
    for (std::size_t r = 0; r < kk; ++r) {
      rs::ReceivedWord word(n());
      for (const NodeChunk& c : chunks) {
        const Element x = code_.point(c.node);
        Element e;
        Element xp = field_.pow(x, static_cast<std::int64_t>(kk));
        for (std::size_t q = 0; q < d() - kk; ++q) {
          e += field_.mul(a2[q][r], xp);
          xp = field_.mul(xp, x);
        }
        word.set(c.node, c.stripe(stripe)[r] - e);
      }
      const std::vector<Element> a1 = rs::decode_error_erasure(data_code_, word).message;
      for (std::size_t c = 0; c < kk; ++c) u(r, c) = a1[c];
    }
    for (std::size_t q = 0; q < d() - kk; ++q)
      for (std::size_t c = 0; c < kk; ++c) u(kk + q, c) = a2[q][c];
    return read_u(u);
  }

  MbrParams params_;
  gf::Field field_;
  rs::RsCode code_;
  rs::RsCode data_code_;
  FillMap fill_;
};

}  // namespace regen::mbr
