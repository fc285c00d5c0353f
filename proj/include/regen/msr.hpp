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

namespace regen::msr {

using gf::Element;

struct MsrParams {
  std::size_t n = 6;
  std::size_t k = 3;
  std::size_t d = 4;
  std::size_t beta = 1;
  gf::FieldParams field = gf::FieldParams::defaults(4);
};

/// alpha = d - k + 1 = k - 1.
constexpr std::size_t alpha_for(std::size_t k) noexcept { return k - 1; }
/// B = alpha (alpha + 1).
constexpr std::size_t message_size_for(std::size_t k) noexcept { return alpha_for(k) * k; }

/// Message index of every upper-triangle cell of A1 and A2, 1-based (i, j)
/// with j running over U's columns: A1 for i <= j <= alpha, A2 for
/// i + alpha <= j <= 2 alpha. Returned as 0-based (row, column of U, index).
inline std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> fill_indices(std::size_t alpha) {
  std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> out;
  const auto a = static_cast<std::int64_t>(alpha);
  const std::int64_t half = a * (a + 1) / 2;
  for (std::int64_t i = 1; i <= a; ++i) {
    for (std::int64_t j = i; j <= a; ++j) {
      out.emplace_back(i - 1, j - 1, (i - 1) * (a + 1) - i * (i + 1) / 2 + j);
    }
    for (std::int64_t j = i + a; j <= 2 * a; ++j) {
      out.emplace_back(i - 1, j - 1, (a + 1) * (i - 1) + half - i * (i + 1) / 2 + (j - a));
    }
  }
  return out;
}

class MsrCode {
 public:
  explicit MsrCode(const MsrParams& params)
      : params_(params), field_(params.field), code_(field_, checked_n(params, field_), params.d) {
    const std::size_t a = alpha();
    for (std::size_t j = 0; j < params_.n; ++j) {
      lambda_.push_back(field_.pow(code_.point(j), static_cast<std::int64_t>(a)));
      for (std::size_t t = 0; t < j; ++t) {
        if (lambda_[t] == lambda_[j]) {
          throw Error(Errc::InvalidParams, "lambda_i = x_i^alpha is not distinct over GF(2^" +
                                               std::to_string(field_.m()) + "); use a larger field");
        }
      }
    }
    fill_ = fill_map_from_indices(fill_indices(a), message_symbols());
    validate_fill_map(fill_, message_symbols(), a, 2 * a);
  }

  MsrCode(gf::Field field, std::size_t n, std::size_t k, std::size_t beta = 1)
      : MsrCode(MsrParams{n, k, 2 * k - 2, beta, field.params()}) {}

  Family family() const noexcept { return Family::Msr; }
  const MsrParams& params() const noexcept { return params_; }
  std::size_t n() const noexcept { return params_.n; }
  std::size_t k() const noexcept { return params_.k; }
  std::size_t d() const noexcept { return params_.d; }
  std::size_t alpha() const noexcept { return alpha_for(params_.k); }
  std::size_t beta() const noexcept { return params_.beta; }
  std::size_t message_symbols() const noexcept { return message_size_for(params_.k); }
  const gf::Field& field() const noexcept { return field_; }
  /// [n, d] code whose codewords are the rows of U·G.
  const rs::RsCode& repair_code() const noexcept { return code_; }
  const FillMap& fill_map() const noexcept { return fill_; }

  Element point(std::size_t node) const { return code_.point(node); }
  Element lambda(std::size_t node) const { return lambda_.at(node); }

  /// g_i = [1, x_i, ..., x_i^(alpha-1)].
  std::vector<Element> repair_vector(std::size_t node) const { return powers(code_.point(node), alpha()); }

  /// U = [A1 | A2], alpha x 2 alpha, both halves symmetric.
  Matrix build_u(std::span<const Element> message) const {
    if (message.size() != message_symbols()) {
      throw Error(Errc::LengthMismatch, "MSR stripe needs B = " + std::to_string(message_symbols()) + " symbols");
    }
    const std::size_t a = alpha();
    Matrix u(a, 2 * a);
    for (std::size_t idx = 0; idx < fill_.size(); ++idx) {
      const auto [r, c] = fill_[idx];
      u(r, c) = message[idx];
      if (c < a) {
        u(c, r) = message[idx];
      } else {
        u(c - a, r + a) = message[idx];
      }
    }
    return u;
  }

  /// Reads the upper triangles only; the lower halves are not checked.
  std::vector<Element> read_u(const Matrix& u) const {
    if (u.rows() != alpha() || u.cols() != 2 * alpha()) throw Error(Errc::LengthMismatch, "U has the wrong shape");
    std::vector<Element> message(fill_.size());
    for (std::size_t idx = 0; idx < fill_.size(); ++idx) message[idx] = u(fill_[idx].first, fill_[idx].second);
    return message;
  }

  /// Column j of U·G for every node j.
  std::vector<std::vector<Element>> encode_stripe(const Matrix& u) const {
    std::vector<std::vector<Element>> columns(n(), std::vector<Element>(alpha()));
    for (std::size_t r = 0; r < alpha(); ++r) {
      const std::vector<Element> row = code_.encode(u.row(r));
      for (std::size_t j = 0; j < n(); ++j) columns[j][r] = row[j];
    }
    return columns;
  }

  /// beta * B message symbols in, n chunks of beta * alpha symbols out.
  std::vector<NodeChunk> encode(std::span<const Element> message) const {
    const std::size_t b = message_symbols();
    if (message.size() != b * beta()) {
      throw Error(Errc::LengthMismatch, "expected beta * B = " + std::to_string(b * beta()) + " symbols");
    }
    std::vector<NodeChunk> chunks(n());
    for (std::size_t j = 0; j < n(); ++j) chunks[j] = NodeChunk{j, alpha(), {}};
    for (std::size_t s = 0; s < beta(); ++s) {
      const auto columns = encode_stripe(build_u(message.subspan(s * b, b)));
      for (std::size_t j = 0; j < n(); ++j)
        chunks[j].symbols.insert(chunks[j].symbols.end(), columns[j].begin(), columns[j].end());
    }
    return chunks;
  }

  /// Recovers all beta stripes from exactly k distinct error-free chunks
  /// without error decoding, using the symmetry of A1 and A2.
  std::vector<Element> reconstruct_fast(std::span<const NodeChunk> chunks) const {
    if (chunks.size() != k()) throw Error(Errc::InvalidParams, "fast reconstruction needs exactly k chunks");
    for (std::size_t s = 0; s < chunks.size(); ++s) {
      check_chunk(chunks[s]);
      for (std::size_t t = 0; t < s; ++t)
        if (chunks[t].node == chunks[s].node) throw Error(Errc::DuplicatePosition, "repeated node in access set");
    }
    const std::size_t a = alpha();
    std::vector<std::vector<Element>> g(k());
    for (std::size_t s = 0; s < k(); ++s) g[s] = repair_vector(chunks[s].node);

    // Solvers for "w · g_t = rhs_t over t != s", one per s < alpha.
    std::vector<Matrix> solvers;
    for (std::size_t s = 0; s < a; ++s) {
      Matrix v(a, a);
      for (std::size_t t = 0, r = 0; t < k(); ++t) {
        if (t == s) continue;
        for (std::size_t c = 0; c < a; ++c) v(r, c) = g[t][c];
        ++r;
      }
      solvers.push_back(invert(field_, v));
    }
    Matrix gbar(a, a);
    for (std::size_t s = 0; s < a; ++s)
      for (std::size_t r = 0; r < a; ++r) gbar(r, s) = g[s][r];
    const Matrix gbar_inv = invert(field_, gbar);

    std::vector<Element> message;
    message.reserve(message_symbols() * beta());
    for (std::size_t stripe = 0; stripe < beta(); ++stripe) {
      Matrix m(k(), k());  // m(s, t) = g_s · y_t
      for (std::size_t s = 0; s < k(); ++s)
        for (std::size_t t = 0; t < k(); ++t) m(s, t) = dot(field_, g[s], chunks[t].stripe(stripe));
      Matrix p(k(), k()), q(k(), k());
      for (std::size_t s = 0; s < k(); ++s)
        for (std::size_t t = 0; t < k(); ++t) {
          if (s == t) continue;
          const Element lt = lambda_[chunks[t].node];
          const Element ls = lambda_[chunks[s].node];
          q(s, t) = field_.div(m(s, t) + m(t, s), ls + lt);
          p(s, t) = m(s, t) + field_.mul(lt, q(s, t));
        }
      const Matrix a1 = solve_block(p, solvers, gbar_inv);
      const Matrix a2 = solve_block(q, solvers, gbar_inv);
      Matrix u(a, 2 * a);
      for (std::size_t r = 0; r < a; ++r)
        for (std::size_t c = 0; c < a; ++c) {
          u(r, c) = a1(r, c);
          u(r, c + a) = a2(r, c);
        }
      const std::vector<Element> part = read_u(u);
      message.insert(message.end(), part.begin(), part.end());
    }
    return message;
  }

  /// Collector protocol: k-node fast path, then progressive error-erasure
  /// decoding of every row of Y starting at d + 2 chunks, two more per round,
  /// until the payload CRC holds or no node is left.
  template <ChunkSource Source>
  ReconstructionResult reconstruct(const MessageLayout& layout, Source& source) const {
    check_layout(layout);
    ReconstructionResult result;
    std::vector<rs::ProgressiveDecoder> rows(alpha() * beta(), rs::ProgressiveDecoder(code_));
    std::vector<NodeChunk> first;
    auto absorb = [&](const std::vector<NodeChunk>& batch) {
      for (const NodeChunk& c : batch) {
        check_chunk(c);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i].absorb(c.node, c.symbols[i]);
      }
    };

    first = source.fetch(k());
    absorb(first);
    if (first.size() == k()) {
      ++result.rounds;
      std::vector<Element> message = reconstruct_fast(first);
      if (layout.verify(message)) {
        result.outcome = Outcome::Success;
        result.message = std::move(message);
        result.fast_path = true;
        return result;
      }
    }
    const std::vector<NodeChunk> rest = source.fetch(d() - first.size());
    absorb(rest);
    bool fresh = true;
    while (true) {
      const std::vector<NodeChunk> more = source.fetch(2);
      if (more.empty() && !fresh) break;
      absorb(more);
      fresh = false;
      ++result.rounds;
      try {
        std::vector<Element> message = decode_rows(rows);
        if (layout.verify(message)) {
          result.outcome = Outcome::Success;
          result.message = std::move(message);
          return result;
        }
      } catch (const Error& e) {
        if (e.code() != Errc::DecodeFailure) throw;
      }
      if (more.empty()) break;
    }
    result.outcome = Outcome::ClusterExhausted;
    return result;
  }

  /// Helper side of repair: g_failed · y for each stripe.
  std::vector<Element> repair_response(const NodeChunk& chunk, std::size_t failed) const {
    if (chunk.node == failed) throw Error(Errc::SelfRepair, "node cannot help repair itself");
    check_chunk(chunk);
    const std::vector<Element> g = repair_vector(failed);
    std::vector<Element> out(beta());
    for (std::size_t s = 0; s < beta(); ++s) out[s] = dot(field_, g, chunk.stripe(s));
    return out;
  }

  /// g_i·U = [g_i A1 | g_i A2] to the stored stripe A1 g_i + lambda_i A2 g_i.
  std::vector<Element> stripe_from_repair(std::size_t failed, std::span<const Element> gu) const {
    if (gu.size() != d()) throw Error(Errc::LengthMismatch, "g_i·U must have d entries");
    std::vector<Element> out(alpha());
    const Element l = lambda_.at(failed);
    for (std::size_t r = 0; r < alpha(); ++r) out[r] = gu[r] + field_.mul(l, gu[r + alpha()]);
    return out;
  }

  void check_chunk(const NodeChunk& c) const {
    if (c.node >= n()) throw Error(Errc::InvalidParams, "node index out of range");
    if (c.alpha != alpha() || c.symbols.size() != alpha() * beta())
      throw Error(Errc::LengthMismatch, "chunk does not hold beta * alpha symbols");
  }

 private:
  static std::size_t checked_n(const MsrParams& p, const gf::Field& f) {
    if (p.k < 2) throw Error(Errc::InvalidParams, "MSR needs k >= 2");
    if (p.d != 2 * p.k - 2) throw Error(Errc::InvalidParams, "MSR construction requires d = 2k - 2");
    if (p.d > p.n - 1 || p.n < 2) throw Error(Errc::InvalidParams, "need k <= d <= n - 1");
    if (p.beta == 0) throw Error(Errc::InvalidParams, "beta must be positive");
    if (p.n > f.group_order()) throw Error(Errc::InvalidParams, "n exceeds 2^m - 1");
    return p.n;
  }

  std::vector<Element> powers(Element x, std::size_t len) const {
    std::vector<Element> v(len);
    Element acc(1);
    for (auto& e : v) {
      e = acc;
      acc = field_.mul(acc, x);
    }
    return v;
  }

  // rhs(s, t) = (A g_s) · g_t for s != t; returns A.
  Matrix solve_block(const Matrix& rhs, const std::vector<Matrix>& solvers, const Matrix& gbar_inv) const {
    const std::size_t a = alpha();
    Matrix w(a, a);  // column s is A g_s
    for (std::size_t s = 0; s < a; ++s) {
      std::vector<Element> b;
      for (std::size_t t = 0; t < k(); ++t)
        if (t != s) b.push_back(rhs(s, t));
      for (std::size_t r = 0; r < a; ++r) {
        Element acc;
        for (std::size_t c = 0; c < a; ++c) acc += field_.mul(solvers[s](r, c), b[c]);
        w(r, s) = acc;
      }
    }
    return multiply(field_, w, gbar_inv);
  }

  std::vector<Element> decode_rows(const std::vector<rs::ProgressiveDecoder>& rows) const {
    const std::size_t a = alpha();
    std::vector<Element> message;
    message.reserve(message_symbols() * beta());
    for (std::size_t s = 0; s < beta(); ++s) {
      Matrix u(a, 2 * a);
      for (std::size_t r = 0; r < a; ++r) {
        const std::vector<Element> coeffs = rows[s * a + r].attempt().message;
        for (std::size_t c = 0; c < 2 * a; ++c) u(r, c) = coeffs[c];
      }
      const std::vector<Element> part = read_u(u);
      message.insert(message.end(), part.begin(), part.end());
    }
    return message;
  }

  void check_layout(const MessageLayout& layout) const {
    if (layout.m() != field_.m() || layout.symbols_per_stripe() != message_symbols() || layout.stripes() != beta())
      throw Error(Errc::InvalidParams, "message layout does not match the code");
  }

  MsrParams params_;
  gf::Field field_;
  rs::RsCode code_;
  std::vector<Element> lambda_;
  FillMap fill_;
};

}  // namespace regen::msr
