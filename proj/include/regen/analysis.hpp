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
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "regen/codes.hpp"
#include "regen/error.hpp"
#include "regen/integrity.hpp"

namespace regen::analysis {

/// Exact fraction with positive denominator, kept reduced.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw Error(Errc::InvalidParams, "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  constexpr bool is_integer() const noexcept { return den == 1; }
  constexpr double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

  friend constexpr bool operator==(const Rational&, const Rational&) = default;
};

/// "0.77%": value * 100 rounded to two decimals.
inline std::string percent(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%%", r.value() * 100.0);
  return buf;
}

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// sum_{i<k} min(alpha, (d - i) beta).
inline std::int64_t cut_set_bound(std::int64_t n, std::int64_t k, std::int64_t d, std::int64_t alpha,
                                  std::int64_t beta) {
  if (k < 1 || k > d || d > n - 1 || alpha < 1 || beta < 1)
    throw Error(Errc::InvalidParams, "cut-set bound needs 1 <= k <= d <= n-1 and positive alpha, beta");
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < k; ++i) total += std::min(alpha, (d - i) * beta);
  return total;
}

struct OperatingPoint {
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
};

/// alpha = B/k, beta = B / (k (d - k + 1)).
inline OperatingPoint msr_point(std::int64_t b, std::int64_t k, std::int64_t d) {
  if (k < 1 || k > d || b < 1) throw Error(Errc::InvalidParams, "need 1 <= k <= d and B >= 1");
  const std::int64_t beta_den = k * (d - k + 1);
  if (b % k != 0 || b % beta_den != 0)
    throw Error(Errc::NonIntegralPoint, "B = " + std::to_string(b) + " gives a fractional MSR point");
  return {b / k, b / beta_den};
}

/// beta = 2B / (k (2d - k + 1)), alpha = d beta.
inline OperatingPoint mbr_point(std::int64_t b, std::int64_t k, std::int64_t d) {
  if (k < 1 || k > d || b < 1) throw Error(Errc::InvalidParams, "need 1 <= k <= d and B >= 1");
  const std::int64_t den = k * (2 * d - k + 1);
  if ((2 * b) % den != 0)
    throw Error(Errc::NonIntegralPoint, "B = " + std::to_string(b) + " gives a fractional MBR point");
  const std::int64_t beta = 2 * b / den;
  return {d * beta, beta};
}

/// Parameters of one stored file; B is per stripe.
struct CodePoint {
  Family family = Family::Msr;
  std::int64_t n = 0, k = 0, d = 0;
  std::int64_t alpha = 0, beta = 1, b = 0;
  unsigned m = 8;
  unsigned r = 32;
  unsigned share_bits = 0;       // m'
  std::int64_t share_dim = 0;    // k'
  ChecksumScheme scheme = ChecksumScheme::Replicated;
};

/// Fills alpha, B, m' and k' for a family. `share_bits` defaults to
/// ceil(log2(n-1)).
inline CodePoint make_point(Family family, std::int64_t n, std::int64_t k, std::int64_t d, std::int64_t beta,
                            unsigned m, unsigned r = 32, std::optional<unsigned> share_bits = std::nullopt,
                            ChecksumScheme scheme = ChecksumScheme::Replicated) {
  if (k < 1 || k > d || d > n - 1) throw Error(Errc::InvalidParams, "need 1 <= k <= d <= n-1");
  if (beta < 1) throw Error(Errc::InvalidParams, "beta must be positive");
  if (family == Family::Msr && d != 2 * k - 2)
    throw Error(Errc::InvalidParams, "the MSR construction needs d = 2k - 2");
  CodePoint p;
  p.family = family;
  p.n = n;
  p.k = k;
  p.d = d;
  p.beta = beta;
  p.m = m;
  p.r = r;
  p.scheme = scheme;
  if (family == Family::Msr) {
    p.alpha = d - k + 1;
    p.b = k * p.alpha;
  } else {
    p.alpha = d;
    p.b = k * d - k * (k - 1) / 2;
  }
  p.share_bits = share_bits.value_or(default_share_bits(static_cast<std::size_t>(n)));
  p.share_dim = static_cast<std::int64_t>(share_dimension(r, p.share_bits));
  return p;
}

struct Tolerance {
  std::int64_t reconstruction = 0;
  std::int64_t regeneration = 0;
};

struct CapabilityReport {
  CodePoint point;
  Tolerance erasures;   // regeneration counts the node being repaired
  Tolerance byzantine;  // regeneration uses the coded checksum's k'
  Tolerance security;
  /// Crashes a repair survives besides the failed node: n - d - 1.
  std::int64_t regeneration_extra_erasures = 0;
  /// Byzantine helpers a repair with every other node contacted can absorb:
  /// the failed node is always an erasure, so floor((n-1-d)/2).
  std::int64_t byzantine_regeneration_all_helpers = 0;
  /// Byzantine regeneration budget with replicated checksums (majority of d).
  std::int64_t byzantine_regeneration_replicated = 0;

  Rational payload_redundancy;             // r / (m B - r)
  Rational payload_redundancy_striped;     // r / (beta B m - r)
  Rational storage_ratio_coded;            // (n-1) m' / (beta alpha m)
  Rational storage_ratio_replicated;       // (n-1) r / (beta alpha m)
  Rational bandwidth_ratio_coded;          // m' / (beta m)
  Rational bandwidth_ratio_replicated;     // r / (beta m)
  std::int64_t checksum_storage_bits_coded = 0;
  std::int64_t checksum_storage_bits_replicated = 0;

  std::int64_t repair_symbols = 0;       // d beta
  std::int64_t naive_repair_symbols = 0; // k alpha beta: reconstruct, then re-encode
  Rational repair_saving;                // naive / repair
};

constexpr std::int64_t floor_half(std::int64_t x) noexcept { return x >= 0 ? x / 2 : -((-x + 1) / 2); }
constexpr std::int64_t ceil_half(std::int64_t x) noexcept { return -floor_half(-x); }

inline CapabilityReport capability_table(const CodePoint& p) {
  if (p.k < 1 || p.k > p.d || p.d > p.n - 1 || p.alpha < 1 || p.beta < 1 || p.m == 0)
    throw Error(Errc::InvalidParams, "invalid code point");
  const std::int64_t m = p.m, r = p.r, mp = p.share_bits, kp = p.share_dim;
  const bool msr = p.family == Family::Msr;
  CapabilityReport c;
  c.point = p;
  c.erasures = {p.n - p.k, p.n - p.d};
  c.regeneration_extra_erasures = p.n - p.d - 1;
  const std::int64_t regen_rs = floor_half(p.n - p.d);
  c.byzantine = {msr ? floor_half(p.n - p.d) : floor_half(p.n - p.k), std::min(regen_rs, floor_half(p.d - kp))};
  c.byzantine_regeneration_all_helpers = floor_half(p.n - 1 - p.d);
  c.byzantine_regeneration_replicated = std::min(regen_rs, floor_half(p.d - 1));
  c.security = {msr ? std::min(p.k, ceil_half(p.n - p.d + 2)) - 1 : std::min(p.k, ceil_half(p.n - p.k + 2)) - 1,
                std::min(p.d, ceil_half(p.n - p.d + 2)) - 1};

  const std::int64_t info_bits = m * p.b;
  c.payload_redundancy = Rational(r, info_bits - r);
  c.payload_redundancy_striped = Rational(r, p.beta * info_bits - r);
  const std::int64_t node_bits = p.beta * p.alpha * m;
  c.checksum_storage_bits_coded = (p.n - 1) * mp;
  c.checksum_storage_bits_replicated = (p.n - 1) * r;
  c.storage_ratio_coded = Rational(c.checksum_storage_bits_coded, node_bits);
  c.storage_ratio_replicated = Rational(c.checksum_storage_bits_replicated, node_bits);
  c.bandwidth_ratio_coded = Rational(mp, p.beta * m);
  c.bandwidth_ratio_replicated = Rational(r, p.beta * m);

  c.repair_symbols = p.d * p.beta;
  c.naive_repair_symbols = p.k * p.alpha * p.beta;
  c.repair_saving = Rational(c.naive_repair_symbols, c.repair_symbols);
  return c;
}

/// key=value report with stable field names.
inline std::string render(const CapabilityReport& c) {
  const CodePoint& p = c.point;
  std::ostringstream o;
  auto ratio = [&](const char* key, const Rational& v) {
    o << key << '=' << percent(v) << '\n' << key << "_exact=" << v.str() << '\n';
  };
  o << "family=" << to_string(p.family) << '\n'
    << "n=" << p.n << "\nk=" << p.k << "\nd=" << p.d << '\n'
    << "alpha=" << p.alpha << "\nbeta=" << p.beta << "\nB=" << p.b << '\n'
    << "m=" << p.m << "\nr=" << p.r << "\nm_prime=" << p.share_bits << "\nk_prime=" << p.share_dim << '\n'
    << "scheme=" << to_string(p.scheme) << '\n'
    << "cut_set_bound=" << cut_set_bound(p.n, p.k, p.d, p.alpha, 1) << '\n'
    << "erasures_reconstruction=" << c.erasures.reconstruction << '\n'
    << "erasures_regeneration=" << c.erasures.regeneration << '\n'
    << "erasures_regeneration_extra=" << c.regeneration_extra_erasures << '\n'
    << "byzantine_reconstruction=" << c.byzantine.reconstruction << '\n'
    << "byzantine_regeneration=" << c.byzantine.regeneration << '\n'
    << "byzantine_regeneration_replicated=" << c.byzantine_regeneration_replicated << '\n'
    << "byzantine_regeneration_all_helpers=" << c.byzantine_regeneration_all_helpers << '\n'
    << "security_reconstruction=" << c.security.reconstruction << '\n'
    << "security_regeneration=" << c.security.regeneration << '\n';
  if (p.family == Family::Mbr) o << "security_regeneration_note=same threshold as msr regeneration\n";
  ratio("payload_redundancy", c.payload_redundancy);
  ratio("payload_redundancy_striped", c.payload_redundancy_striped);
  ratio("storage_ratio_replicated", c.storage_ratio_replicated);
  ratio("storage_ratio_coded", c.storage_ratio_coded);
  ratio("bandwidth_ratio_replicated", c.bandwidth_ratio_replicated);
  ratio("bandwidth_ratio_coded", c.bandwidth_ratio_coded);
  o << "checksum_storage_bits_replicated=" << c.checksum_storage_bits_replicated << '\n'
    << "checksum_storage_bits_coded=" << c.checksum_storage_bits_coded << '\n'
    << "repair_symbols=" << c.repair_symbols << '\n'
    << "naive_repair_symbols=" << c.naive_repair_symbols << '\n'
    << "repair_saving=" << fixed2(c.repair_saving.value()) << "x\n";
  return o.str();
}

}  // namespace regen::analysis
