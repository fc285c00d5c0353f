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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regen/error.hpp"
#include "regen/galois.hpp"
#include "regen/matrix.hpp"

namespace regen::rs {

using gf::Element;

struct RsParams {
  std::size_t n = 0;
  std::size_t dim = 0;
  gf::FieldParams field;
};

/// Evaluation-style Reed-Solomon code: position p holds u(a^p) for a message
/// polynomial u of degree < dim. When n < 2^m - 1 the code is treated as the
/// full-length code with positions n..2^m-2 permanently erased.
class RsCode {
 public:
  RsCode(gf::Field field, std::size_t n, std::size_t dim) {
    if (dim == 0 || dim > n) {
      throw Error(Errc::InvalidParams, "RS code needs 1 <= dim <= n (n=" + std::to_string(n) +
                                           ", dim=" + std::to_string(dim) + ")");
    }
    if (n > field.group_order()) {
      throw Error(Errc::InvalidParams, "RS code length " + std::to_string(n) +
                                           " exceeds 2^m-1 = " + std::to_string(field.group_order()));
    }
    auto impl = std::make_shared<Impl>(Impl{field, n, dim, {}, {}, {}, {}});
    const std::size_t full = field.group_order();
    impl->points.resize(n);
    impl->inv_points.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      impl->points[p] = field.exp(static_cast<std::int64_t>(p));
      impl->inv_points[p] = field.exp(-static_cast<std::int64_t>(p));
    }
    // Dual-code column multipliers 1 / prod_{j != p} (X_p - X_j).
    impl->grs.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      Element prod(1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != p) prod = field.mul(prod, impl->points[p] - impl->points[j]);
      impl->grs[p] = field.inv(prod);
    }
    // Same multipliers seen through the full-length embedding: the fixed
    // erasure locator Gamma(x) = prod_{e >= n} (1 - a^e x) folds the missing
    // tail into X_p^(N-n+1) * Gamma(X_p^-1).
    impl->embedding.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      Element gamma(1);
      for (std::size_t e = n; e < full; ++e)
        gamma = field.mul(gamma, Element(1) + field.mul(field.exp(static_cast<std::int64_t>(e)),
                                                        impl->inv_points[p]));
      impl->embedding[p] =
          field.mul(gamma, field.pow(impl->points[p], static_cast<std::int64_t>(full - n + 1)));
    }
    impl_ = std::move(impl);
  }

  explicit RsCode(const RsParams& params) : RsCode(gf::Field(params.field), params.n, params.dim) {}

  const gf::Field& field() const noexcept { return impl_->field; }
  std::size_t n() const noexcept { return impl_->n; }
  std::size_t dim() const noexcept { return impl_->dim; }
  /// Number of parity checks of the shortened code, n - dim.
  std::size_t redundancy() const noexcept { return impl_->n - impl_->dim; }
  /// Length of the full-length code the shortened code embeds into.
  std::size_t full_length() const noexcept { return impl_->field.group_order(); }

  Element point(std::size_t p) const { return impl_->points.at(p); }
  Element inverse_point(std::size_t p) const { return impl_->inv_points.at(p); }
  Element grs_multiplier(std::size_t p) const { return impl_->grs.at(p); }
  Element embedding_multiplier(std::size_t p) const { return impl_->embedding.at(p); }

  std::vector<Element> encode(std::span<const Element> message) const {
    if (message.size() != dim()) {
      throw Error(Errc::LengthMismatch, "RS message has " + std::to_string(message.size()) +
                                            " symbols, expected " + std::to_string(dim()));
    }
    std::vector<Element> out(n());
    for (std::size_t p = 0; p < n(); ++p) out[p] = gf::eval_poly(field(), message, impl_->points[p]);
    return out;
  }

 private:
  struct Impl {
    gf::Field field;
    std::size_t n;
    std::size_t dim;
    std::vector<Element> points;
    std::vector<Element> inv_points;
    std::vector<Element> grs;
    std::vector<Element> embedding;
  };
  std::shared_ptr<const Impl> impl_;
};

/// dim x n generator matrix with entry (r, c) = (a^c)^r, so encode(u) = u * G.
inline Matrix vandermonde(const RsCode& code) {
  Matrix g(code.dim(), code.n());
  for (std::size_t c = 0; c < code.n(); ++c) {
    Element v(1);
    for (std::size_t r = 0; r < code.dim(); ++r) {
      g(r, c) = v;
      v = code.field().mul(v, code.point(c));
    }
  }
  return g;
}

/// Inverse of the square submatrix of g formed by the listed columns.
inline Matrix invert_submatrix(const gf::Field& f, const Matrix& g, std::span<const std::size_t> cols) {
  if (cols.size() != g.rows()) {
    throw Error(Errc::LengthMismatch, "need exactly rows() columns to form a square submatrix");
  }
  return invert(f, g.select_columns(cols));
}

/// Received symbols by position; a missing position is an erasure.
class ReceivedWord {
 public:
  explicit ReceivedWord(std::size_t n) : symbols_(n) {}

  std::size_t size() const noexcept { return symbols_.size(); }

  void set(std::size_t pos, Element value) { symbols_.at(pos) = value; }
  void erase(std::size_t pos) { symbols_.at(pos).reset(); }
  bool has(std::size_t pos) const { return symbols_.at(pos).has_value(); }
  Element at(std::size_t pos) const { return symbols_.at(pos).value(); }
  const std::optional<Element>& operator[](std::size_t pos) const { return symbols_[pos]; }

  std::size_t present() const noexcept {
    std::size_t count = 0;
    for (const auto& s : symbols_) count += s.has_value() ? 1 : 0;
    return count;
  }

  std::vector<std::size_t> erasures() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < symbols_.size(); ++p)
      if (!symbols_[p]) out.push_back(p);
    return out;
  }

  static ReceivedWord from_codeword(std::span<const Element> codeword) {
    ReceivedWord w(codeword.size());
    for (std::size_t p = 0; p < codeword.size(); ++p) w.set(p, codeword[p]);
    return w;
  }

 private:
  std::vector<std::optional<Element>> symbols_;
};

struct DecodeOutcome {
  std::vector<Element> codeword;
  /// Coefficients of the message polynomial (the row that produced the codeword).
  std::vector<Element> message;
  std::vector<std::size_t> error_positions;
  std::size_t corrected_count = 0;
};

namespace detail {

/// Shortest LFSR (connection polynomial, constant term 1) generating seq.
inline std::vector<Element> berlekamp_massey(const gf::Field& f, std::span<const Element> seq) {
  std::vector<Element> conn{Element(1)};
  std::vector<Element> prev{Element(1)};
  std::size_t length = 0;
  std::size_t shift = 1;
  Element prev_disc(1);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    Element disc = seq[i];
    for (std::size_t j = 1; j <= length && j < conn.size(); ++j) disc += f.mul(conn[j], seq[i - j]);
    if (disc.is_zero()) {
      ++shift;
      continue;
    }
    const Element coef = f.div(disc, prev_disc);
    std::vector<Element> next = conn;
    if (next.size() < prev.size() + shift) next.resize(prev.size() + shift);
    for (std::size_t j = 0; j < prev.size(); ++j) next[j + shift] += f.mul(coef, prev[j]);
    if (2 * length <= i) {
      prev = conn;
      length = i + 1 - length;
      prev_disc = disc;
      shift = 1;
    } else {
      ++shift;
    }
    conn = std::move(next);
  }
  conn.resize(length + 1);
  return conn;
}

/// Monomial coefficients of the unique polynomial of degree < xs.size()
/// through the given points (Newton divided differences).
inline std::vector<Element> interpolate(const gf::Field& f, std::span<const Element> xs,
                                        std::span<const Element> ys) {
  const std::size_t k = xs.size();
  std::vector<Element> c(ys.begin(), ys.end());
  for (std::size_t j = 1; j < k; ++j)
    for (std::size_t i = k - 1; i >= j; --i) c[i] = f.div(c[i] - c[i - 1], xs[i] - xs[i - j]);
  std::vector<Element> poly{c.empty() ? Element{} : c[k - 1]};
  for (std::size_t i = k - 1; i-- > 0;) {
    // poly <- poly * (x - xs[i]) + c[i]
    poly.push_back(Element{});
    for (std::size_t j = poly.size() - 1; j > 0; --j) poly[j] = poly[j - 1] + f.mul(xs[i], poly[j]);
    poly[0] = f.mul(xs[i], poly[0]) + c[i];
  }
  poly.resize(k);
  return poly;
}

[[noreturn]] inline void decode_failure(const std::string& why) {
  throw Error(Errc::DecodeFailure, why);
}

/// Shared back half of the decoder: errata-modified syndromes, error locator
/// by Berlekamp-Massey, Chien search over received positions, then recovery
/// of the message by interpolation through error-free positions.
/// `reduced` holds the n - dim syndromes sum_p w_p y_p X_p^l of the
/// zero-filled received word.
inline DecodeOutcome finish_decode(const RsCode& code, const ReceivedWord& word,
                                   std::span<const Element> reduced) {
  const gf::Field& f = code.field();
  const std::size_t n = code.n();
  const std::size_t dim = code.dim();
  const std::vector<std::size_t> missing = word.erasures();
  const std::size_t s = missing.size();
  if (n - s < dim) decode_failure("only " + std::to_string(n - s) + " symbols for dimension " +
                                  std::to_string(dim));
  const std::size_t budget = n - dim - s;

  // Erasure locator prod (1 - X_e x).
  std::vector<Element> gamma{Element(1)};
  for (std::size_t e : missing) {
    gamma.push_back(Element{});
    for (std::size_t j = gamma.size() - 1; j > 0; --j) gamma[j] += f.mul(code.point(e), gamma[j - 1]);
  }
  std::vector<Element> modified(budget);
  for (std::size_t l = s; l < n - dim; ++l) {
    Element acc{};
    for (std::size_t q = 0; q <= s; ++q) acc += f.mul(gamma[q], reduced[l - q]);
    modified[l - s] = acc;
  }

  const std::vector<Element> locator = berlekamp_massey(f, modified);
  const std::size_t errors = locator.size() - 1;
  if (2 * errors > budget) decode_failure("error locator degree exceeds the correction budget");

  std::vector<std::size_t> error_positions;
  if (errors > 0) {
    for (std::size_t p = 0; p < n; ++p) {
      if (!word.has(p)) continue;
      if (gf::eval_poly(f, locator, code.inverse_point(p)).is_zero()) error_positions.push_back(p);
    }
    if (error_positions.size() != errors) decode_failure("Chien search found too few roots");
  }

  std::vector<Element> xs;
  std::vector<Element> ys;
  xs.reserve(dim);
  ys.reserve(dim);
  std::size_t next_error = 0;
  for (std::size_t p = 0; p < n && xs.size() < dim; ++p) {
    if (next_error < error_positions.size() && error_positions[next_error] == p) {
      ++next_error;
      continue;
    }
    if (!word.has(p)) continue;
    xs.push_back(code.point(p));
    ys.push_back(word.at(p));
  }

  DecodeOutcome out;
  out.message = interpolate(f, xs, ys);
  out.codeword = code.encode(out.message);
  next_error = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!word.has(p)) continue;
    const bool flagged = next_error < error_positions.size() && error_positions[next_error] == p;
    if (flagged) ++next_error;
    if ((out.codeword[p] == word.at(p)) == flagged) decode_failure("re-encoded word is inconsistent");
  }
  out.corrected_count = error_positions.size();
  out.error_positions = std::move(error_positions);
  return out;
}

}  // namespace detail

/// Batch error-erasure decoder. Corrects v errors and s erasures whenever
/// 2v + s <= n - dim; throws DecodeFailure when the received word is provably
/// outside that radius.
inline DecodeOutcome decode_error_erasure(const RsCode& code, const ReceivedWord& word) {
  if (word.size() != code.n()) throw Error(Errc::LengthMismatch, "received word length != n");
  const gf::Field& f = code.field();
  std::vector<Element> reduced(code.redundancy());
  for (std::size_t p = 0; p < code.n(); ++p) {
    if (!word.has(p) || word.at(p).is_zero()) continue;
    Element term = f.mul(code.grs_multiplier(p), word.at(p));
    for (auto& r : reduced) {
      r += term;
      term = f.mul(term, code.point(p));
    }
  }
  return detail::finish_decode(code, word, reduced);
}

/// Decoder state that grows as symbols arrive. Syndromes are updated per
/// absorbed symbol instead of being recomputed, so a retry after fetching two
/// more symbols costs only the locator search.
class ProgressiveDecoder {
 public:
  explicit ProgressiveDecoder(RsCode code)
      : code_(std::move(code)),
        received_(code_.n()),
        reduced_(code_.redundancy()) {}

  const RsCode& code() const noexcept { return code_; }
  const ReceivedWord& received() const noexcept { return received_; }
  std::size_t round() const noexcept { return round_; }

  /// S_j = r(a^j), j = 1 .. 2^m - 1 - dim, over the full-length embedding.
  /// Computed on demand; the decoder itself only needs the reduced set.
  std::vector<Element> syndromes() const {
    const gf::Field& f = code_.field();
    std::vector<Element> out(code_.full_length() - code_.dim());
    for (std::size_t pos = 0; pos < code_.n(); ++pos) {
      if (!received_.has(pos) || received_.at(pos).is_zero()) continue;
      const Element x = code_.point(pos);
      Element term = f.mul(received_.at(pos), x);
      for (auto& s : out) {
        s += term;
        term = f.mul(term, x);
      }
    }
    return out;
  }
  /// The n - dim syndromes of the shortened code that the decoder consumes.
  std::span<const Element> reduced_syndromes() const noexcept { return reduced_; }

  void absorb(std::size_t pos, Element value) {
    if (pos >= code_.n()) throw Error(Errc::InvalidParams, "position out of range");
    if (received_.has(pos)) {
      throw Error(Errc::DuplicatePosition, "position " + std::to_string(pos) + " already received");
    }
    received_.set(pos, value);
    if (value.is_zero()) return;
    const gf::Field& f = code_.field();
    const Element x = code_.point(pos);
    Element term = f.mul(value, code_.embedding_multiplier(pos));
    for (auto& r : reduced_) {
      r += term;
      term = f.mul(term, x);
    }
  }

  /// Absorbs one retrieval round.
  void absorb(std::span<const std::pair<std::size_t, Element>> batch) {
    for (const auto& [pos, value] : batch) {
      if (pos < code_.n() && received_.has(pos)) {
        throw Error(Errc::DuplicatePosition, "position " + std::to_string(pos) + " already received");
      }
    }
    for (const auto& [pos, value] : batch) absorb(pos, value);
    ++round_;
  }

  DecodeOutcome attempt() const { return detail::finish_decode(code_, received_, reduced_); }

 private:
  RsCode code_;
  ReceivedWord received_;
  std::vector<Element> reduced_;
  std::size_t round_ = 0;
};

}  // namespace regen::rs
