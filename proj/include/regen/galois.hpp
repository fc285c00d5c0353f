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

#include <cstdint>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "regen/error.hpp"

namespace regen::gf {

/// An element of GF(2^m), m <= 16. Addition needs no field context (it is a
/// bitwise XOR), so it lives on the element; multiplication goes through a
/// Field, which owns the log/antilog tables.
class Element {
 public:
  constexpr Element() noexcept = default;
  constexpr explicit Element(std::uint32_t value) noexcept
      : value_(static_cast<std::uint16_t>(value)) {}

  constexpr std::uint32_t value() const noexcept { return value_; }
  constexpr bool is_zero() const noexcept { return value_ == 0; }

  friend constexpr bool operator==(Element, Element) noexcept = default;
  friend constexpr Element operator+(Element x, Element y) noexcept {
    return Element(static_cast<std::uint32_t>(x.value_ ^ y.value_));
  }
  // Subtraction coincides with addition in characteristic 2.
  friend constexpr Element operator-(Element x, Element y) noexcept { return x + y; }
  constexpr Element& operator+=(Element y) noexcept {
    value_ ^= y.value_;
    return *this;
  }
  constexpr Element& operator-=(Element y) noexcept { return *this += y; }

 private:
  std::uint16_t value_ = 0;
};

/// Primitive polynomial used when the caller does not supply one. The value
/// includes the x^m term.
inline std::uint32_t default_primitive_poly(unsigned m) {
  switch (m) {
    case 2: return 0x7;       // x^2+x+1
    case 3: return 0xB;       // x^3+x+1
    case 4: return 0x13;      // x^4+x+1
    case 5: return 0x25;      // x^5+x^2+1
    case 6: return 0x43;      // x^6+x+1
    case 7: return 0x89;      // x^7+x^3+1
    case 8: return 0x11D;     // x^8+x^4+x^3+x^2+1
    case 9: return 0x211;     // x^9+x^4+1
    case 10: return 0x409;    // x^10+x^3+1
    case 11: return 0x805;    // x^11+x^2+1
    case 12: return 0x1053;   // x^12+x^6+x^4+x+1
    case 13: return 0x201B;   // x^13+x^4+x^3+x+1
    case 14: return 0x4443;   // x^14+x^10+x^6+x+1
    case 15: return 0x8003;   // x^15+x+1
    case 16: return 0x1100B;  // x^16+x^12+x^3+x+1
    default:
      throw Error(Errc::InvalidParams, "field width m must be in [2, 16], got " + std::to_string(m));
  }
}

struct FieldParams {
  unsigned m = 8;
  std::uint32_t prim_poly = 0x11D;
  std::uint32_t generator = 2;

  static FieldParams defaults(unsigned m) { return FieldParams{m, default_primitive_poly(m), 2}; }

  friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

namespace detail {

// Shift-and-add multiplication modulo the field polynomial. Only used while
// building the tables.
inline std::uint32_t mulmod(std::uint32_t x, std::uint32_t y, std::uint32_t poly, unsigned m) {
  std::uint32_t acc = 0;
  const std::uint32_t top = 1u << m;
  while (y != 0) {
    if (y & 1u) acc ^= x;
    y >>= 1;
    x <<= 1;
    if (x & top) x ^= poly;
  }
  return acc;
}

}  // namespace detail

/// GF(2^m) with eager log/antilog tables relative to the configured
/// generator. Immutable after construction; copies share the tables, so a
/// Field is cheap to pass by value and safe to use from many threads.
class Field {
 public:
  explicit Field(FieldParams params) : params_(params) {
    const unsigned m = params.m;
    if (m < 2 || m > 16) {
      throw Error(Errc::InvalidParams, "field width m must be in [2, 16], got " + std::to_string(m));
    }
    if ((params.prim_poly >> m) != 1u) {
      throw Error(Errc::InvalidParams, "primitive polynomial must have degree exactly m");
    }
    const std::uint32_t q = 1u << m;
    if (params.generator == 0 || params.generator >= q) {
      throw Error(Errc::InvalidParams, "generator must be a nonzero field element");
    }
    auto tables = std::make_shared<Tables>();
    const std::uint32_t order = q - 1;
    tables->exp.resize(2 * static_cast<std::size_t>(order));
    tables->log.assign(q, kNoLog);
    std::uint32_t cur = 1;
    for (std::uint32_t i = 0; i < order; ++i) {
      if (tables->log[cur] != kNoLog) {
        throw Error(Errc::InvalidParams,
                    "generator does not have multiplicative order 2^m-1 under this polynomial");
      }
      tables->exp[i] = static_cast<std::uint16_t>(cur);
      tables->log[cur] = i;
      cur = detail::mulmod(cur, params.generator, params.prim_poly, m);
    }
    if (cur != 1) {
      throw Error(Errc::InvalidParams, "polynomial is not primitive for this generator");
    }
    for (std::uint32_t i = 0; i < order; ++i) tables->exp[order + i] = tables->exp[i];
    tables_ = std::move(tables);
  }

  explicit Field(unsigned m) : Field(FieldParams::defaults(m)) {}

  const FieldParams& params() const noexcept { return params_; }
  unsigned m() const noexcept { return params_.m; }
  /// Number of elements q = 2^m.
  std::uint32_t size() const noexcept { return 1u << params_.m; }
  /// Order of the multiplicative group, 2^m - 1.
  std::uint32_t group_order() const noexcept { return size() - 1; }
  Element generator() const noexcept { return Element(params_.generator); }

  bool contains(std::uint32_t value) const noexcept { return value < size(); }
  Element element(std::uint32_t value) const {
    if (!contains(value)) {
      throw Error(Errc::InvalidParams, "value " + std::to_string(value) + " outside GF(2^" +
                                           std::to_string(params_.m) + ")");
    }
    return Element(value);
  }

  static Element add(Element x, Element y) noexcept { return x + y; }
  static Element sub(Element x, Element y) noexcept { return x + y; }

  Element mul(Element x, Element y) const noexcept {
    if (x.is_zero() || y.is_zero()) return Element{};
    const auto& t = *tables_;
    return Element(t.exp[t.log[x.value()] + t.log[y.value()]]);
  }

  Element inv(Element x) const {
    if (x.is_zero()) throw Error(Errc::ZeroInverse, "zero has no multiplicative inverse");
    const auto& t = *tables_;
    const std::uint32_t l = t.log[x.value()];
    return Element(t.exp[l == 0 ? 0 : group_order() - l]);
  }

  Element div(Element x, Element y) const {
    if (y.is_zero()) throw Error(Errc::ZeroInverse, "division by zero");
    if (x.is_zero()) return Element{};
    const auto& t = *tables_;
    return Element(t.exp[t.log[x.value()] + group_order() - t.log[y.value()]]);
  }

  /// x^e; the exponent is reduced modulo 2^m - 1. pow(x, 0) == 1, including x == 0.
  Element pow(Element x, std::int64_t e) const {
    if (e == 0) return Element(1);
    if (x.is_zero()) {
      if (e < 0) throw Error(Errc::ZeroInverse, "zero raised to a negative power");
      return Element{};
    }
    const std::int64_t order = group_order();
    std::int64_t r = (static_cast<std::int64_t>(tables_->log[x.value()]) * (e % order)) % order;
    if (r < 0) r += order;
    return Element(tables_->exp[static_cast<std::size_t>(r)]);
  }

  /// generator^e.
  Element exp(std::int64_t e) const noexcept {
    const std::int64_t order = group_order();
    std::int64_t r = e % order;
    if (r < 0) r += order;
    return Element(tables_->exp[static_cast<std::size_t>(r)]);
  }

  /// Discrete logarithm to the generator base. x must be nonzero.
  std::uint32_t log(Element x) const {
    if (x.is_zero()) throw Error(Errc::ZeroInverse, "log of zero");
    return tables_->log[x.value()];
  }

 private:
  static constexpr std::uint32_t kNoLog = 0xFFFFFFFFu;

  struct Tables {
    std::vector<std::uint16_t> exp;
    std::vector<std::uint32_t> log;
  };

  FieldParams params_;
  std::shared_ptr<const Tables> tables_;
};

/// Evaluates the polynomial with coefficients coeffs (lowest degree first) at x.
template <class Range>
Element eval_poly(const Field& f, const Range& coeffs, Element x) {
  Element acc{};
  for (auto it = std::rbegin(coeffs); it != std::rend(coeffs); ++it) acc = f.mul(acc, x) + *it;
  return acc;
}

}  // namespace regen::gf
