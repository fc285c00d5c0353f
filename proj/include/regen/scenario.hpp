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
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "regen/chunk_file.hpp"
#include "regen/cluster.hpp"
#include "regen/codes.hpp"
#include "regen/crc.hpp"
#include "regen/error.hpp"
#include "regen/integrity.hpp"
#include "regen/layout.hpp"
#include "regen/mbr.hpp"
#include "regen/msr.hpp"

namespace regen {

/// User-facing code description; unset fields get defaults from the others.
struct CodeSpec {
  Family family = Family::Msr;
  std::size_t n = 6;
  std::size_t k = 3;
  std::optional<std::size_t> d;
  std::optional<std::size_t> beta;
  std::optional<unsigned> m;
  std::optional<std::uint32_t> prim_poly;
  unsigned r = 32;
  ChecksumScheme scheme = ChecksumScheme::Replicated;
  std::optional<unsigned> share_bits;

  std::size_t repair_degree() const {
    if (d) return *d;
    if (family == Family::Msr) return 2 * k - 2;
    throw Error(Errc::Usage, "MBR needs --d");
  }
  std::size_t alpha() const { return family == Family::Msr ? k - 1 : repair_degree(); }
  std::size_t message_symbols() const {
    const std::size_t dd = repair_degree();
    return family == Family::Msr ? k * (k - 1) : k * dd - k * (k - 1) / 2;
  }
};

/// Smallest m with room for n distinct points (and, for MSR, n*alpha
/// symbols and distinct x^alpha).
inline unsigned default_field_degree(const CodeSpec& s) {
  unsigned m = std::max(2u, ceil_log2(s.n + 1));
  if (s.family == Family::Mbr) return m;
  m = std::max(m, ceil_log2(s.n * s.alpha()));
  for (; m <= 16; ++m) {
    const std::uint64_t order = (std::uint64_t{1} << m) - 1;
    std::vector<bool> seen(order, false);
    bool distinct = s.n <= order;
    for (std::size_t j = 0; distinct && j < s.n; ++j) {
      const std::uint64_t e = (j * s.alpha()) % order;
      if (seen[e]) distinct = false;
      seen[e] = true;
    }
    if (distinct) return m;
  }
  throw Error(Errc::InvalidParams, "no field up to GF(2^16) fits these parameters");
}

inline gf::FieldParams field_for(const CodeSpec& s) {
  gf::FieldParams f = gf::FieldParams::defaults(s.m.value_or(default_field_degree(s)));
  if (s.prim_poly) f.prim_poly = *s.prim_poly;
  return f;
}

inline std::size_t stripes_for(const CodeSpec& s, std::size_t payload_bytes) {
  if (s.beta) return *s.beta;
  return MessageLayout::stripes_for(payload_bytes, field_for(s).m, s.message_symbols(), s.r);
}

inline ChecksumCodec checksum_codec(const CodeSpec& s) {
  return ChecksumCodec(s.scheme, s.n, crc_for_width(s.r),
                       s.scheme == ChecksumScheme::RsCoded ? s.share_bits : std::nullopt);
}

/// Calls f(code) with an MsrCode or MbrCode built from the spec.
template <class F>
decltype(auto) with_code(const CodeSpec& s, std::size_t beta, F&& f) {
  const gf::FieldParams field = field_for(s);
  if (s.family == Family::Msr) {
    if (s.d && *s.d != 2 * s.k - 2) throw Error(Errc::InvalidParams, "MSR construction requires d = 2k - 2");
    return f(msr::MsrCode(msr::MsrParams{s.n, s.k, 2 * s.k - 2, beta, field}));
  }
  return f(mbr::MbrCode(mbr::MbrParams{s.n, s.k, s.repair_degree(), beta, field}));
}

/// Header fields shared by every chunk of one stored file.
inline io::ChunkHeader header_for(const CodeSpec& s, std::size_t beta, std::size_t payload_bytes) {
  io::ChunkHeader h;
  h.family = s.family;
  h.field = field_for(s);
  h.n = static_cast<std::uint16_t>(s.n);
  h.k = static_cast<std::uint16_t>(s.k);
  h.d = static_cast<std::uint16_t>(s.repair_degree());
  h.beta = static_cast<std::uint32_t>(beta);
  h.r = static_cast<std::uint8_t>(s.r);
  h.scheme = s.scheme;
  h.share_bits = s.scheme == ChecksumScheme::RsCoded
                     ? static_cast<std::uint8_t>(checksum_codec(s).share_bits())
                     : std::uint8_t{0};
  h.payload_bytes = payload_bytes;
  return h;
}

inline CodeSpec spec_from_header(const io::ChunkHeader& h) {
  CodeSpec s;
  s.family = h.family;
  s.n = h.n;
  s.k = h.k;
  s.d = h.d;
  s.beta = h.beta;
  s.m = h.field.m;
  s.prim_poly = h.field.prim_poly;
  s.r = h.r;
  s.scheme = h.scheme;
  if (h.scheme == ChecksumScheme::RsCoded) s.share_bits = h.share_bits;
  return s;
}

enum class Operation { Reconstruct, Regenerate, Both };

/// A simulation run described by a flat key=value file.
struct Scenario {
  CodeSpec code;
  std::optional<std::string> payload_file;
  std::size_t payload_size = 64;
  std::uint64_t seed = 1;
  std::vector<std::size_t> crashes;    // 0-based
  std::vector<std::size_t> byzantine;  // 0-based
  std::size_t crash_count = 0;         // extra random crashes per trial
  std::size_t byzantine_count = 0;     // extra random Byzantine nodes per trial
  bool forgery = false;
  double flip_rate = 1.0;
  std::size_t forge_row = 0;
  bool adversarial = false;
  Operation operation = Operation::Reconstruct;
  std::optional<std::size_t> failed;  // 0-based; random per trial when unset
  std::size_t trials = 1;
  std::optional<std::string> output;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::uint64_t parse_uint(std::string_view v, const std::string& where) {
  std::uint64_t out = 0;
  int base = 10;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    v.remove_prefix(2);
    base = 16;
  }
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw Error(Errc::Usage, where + ": expected a non-negative integer");
  return out;
}

inline std::vector<std::size_t> parse_index_list(std::string_view v, const std::string& where) {
  std::vector<std::size_t> out;
  while (!v.empty()) {
    const std::size_t comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (!item.empty()) {
      const std::uint64_t i = parse_uint(item, where);
      if (i == 0) throw Error(Errc::Usage, where + ": node indices start at 1");
      out.push_back(static_cast<std::size_t>(i - 1));
    }
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Parses lines of `key = value`; '#' starts a comment.
inline Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw Error(Errc::Usage, where + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    const std::string at = where + " (" + key + ")";
    auto num = [&] { return detail::parse_uint(value, at); };
    if (key == "family") {
      if (value == "msr") sc.code.family = Family::Msr;
      else if (value == "mbr") sc.code.family = Family::Mbr;
      else throw Error(Errc::Usage, at + ": family is msr or mbr");
    } else if (key == "n") sc.code.n = num();
    else if (key == "k") sc.code.k = num();
    else if (key == "d") sc.code.d = num();
    else if (key == "beta") sc.code.beta = num();
    else if (key == "m") sc.code.m = static_cast<unsigned>(num());
    else if (key == "prim_poly") sc.code.prim_poly = static_cast<std::uint32_t>(num());
    else if (key == "r") sc.code.r = static_cast<unsigned>(num());
    else if (key == "scheme") {
      if (value == "replicated") sc.code.scheme = ChecksumScheme::Replicated;
      else if (value == "coded") sc.code.scheme = ChecksumScheme::RsCoded;
      else throw Error(Errc::Usage, at + ": scheme is replicated or coded");
    } else if (key == "coded_m") sc.code.share_bits = static_cast<unsigned>(num());
    else if (key == "payload_size") sc.payload_size = num();
    else if (key == "payload_file") sc.payload_file = std::string(value);
    else if (key == "seed") sc.seed = num();
    else if (key == "crashes") sc.crashes = detail::parse_index_list(value, at);
    else if (key == "crash_count") sc.crash_count = num();
    else if (key == "byzantine") sc.byzantine = detail::parse_index_list(value, at);
    else if (key == "byzantine_count") sc.byzantine_count = num();
    else if (key == "strategy") {
      if (value == "random") sc.forgery = false;
      else if (value == "forgery") sc.forgery = true;
      else throw Error(Errc::Usage, at + ": strategy is random or forgery");
    } else if (key == "flip_rate") {
      try {
        sc.flip_rate = std::stod(std::string(value));
      } catch (const std::exception&) {
        throw Error(Errc::Usage, at + ": expected a number");
      }
      if (!(sc.flip_rate >= 0.0 && sc.flip_rate <= 1.0)) throw Error(Errc::Usage, at + ": rate outside [0, 1]");
    } else if (key == "forge_row") sc.forge_row = num();
    else if (key == "policy") {
      if (value == "random") sc.adversarial = false;
      else if (value == "adversarial") sc.adversarial = true;
      else throw Error(Errc::Usage, at + ": policy is random or adversarial");
    } else if (key == "operation") {
      if (value == "reconstruct") sc.operation = Operation::Reconstruct;
      else if (value == "regenerate") sc.operation = Operation::Regenerate;
      else if (value == "both") sc.operation = Operation::Both;
      else throw Error(Errc::Usage, at + ": operation is reconstruct, regenerate or both");
    } else if (key == "failed") {
      const std::uint64_t i = num();
      if (i == 0) throw Error(Errc::Usage, at + ": node indices start at 1");
      sc.failed = static_cast<std::size_t>(i - 1);
    } else if (key == "trials") {
      sc.trials = num();
      if (sc.trials == 0) throw Error(Errc::Usage, at + ": trials must be at least 1");
    } else if (key == "output") sc.output = std::string(value);
    else throw Error(Errc::Usage, at + ": unknown key");
  }
  return sc;
}

struct SimulationSummary {
  std::size_t trials = 0;
  std::size_t runs = 0;
  std::size_t success = 0;        // correct result
  std::size_t wrong_success = 0;  // CRC accepted a wrong result
  std::size_t fail = 0;

  double success_rate() const noexcept { return runs == 0 ? 0.0 : static_cast<double>(success) / runs; }
};

namespace detail {

inline std::string fixed4(double v) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(4);
  o << v;
  return o.str();
}

inline std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
  return s;
}

inline void write_metrics(std::ostream& out, const sim::RunMetrics& m) {
  out << " outcome=" << to_string(m.outcome) << " nodes_contacted=" << m.nodes_contacted
      << " symbols_downloaded=" << m.symbols_downloaded
      << " checksum_shares_downloaded=" << m.checksum_symbols_downloaded
      << " checksum_bits_downloaded=" << m.checksum_bits_downloaded << " decode_rounds=" << m.decode_rounds;
}

// Adds `count` random members of `pool` (not already excluded) to `out`.
inline void pick_random(std::size_t n, std::size_t count, std::vector<bool>& taken, std::vector<std::size_t>& out,
                        std::mt19937_64& rng) {
  std::vector<std::size_t> pool;
  for (std::size_t j = 0; j < n; ++j)
    if (!taken[j]) pool.push_back(j);
  if (count > pool.size()) throw Error(Errc::InvalidParams, "not enough nodes for the requested faults");
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; i < count; ++i) {
    taken[pool[i]] = true;
    out.push_back(pool[i]);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace detail

/// Runs every trial, writing one record per run and an aggregate footer.
inline SimulationSummary simulate(const Scenario& sc, std::ostream& out) {
  std::vector<std::uint8_t> fixed_payload;
  if (sc.payload_file) fixed_payload = io::read_file(*sc.payload_file);
  const std::size_t payload_bytes = sc.payload_file ? fixed_payload.size() : sc.payload_size;
  const std::size_t beta = stripes_for(sc.code, payload_bytes);
  SimulationSummary summary;
  summary.trials = sc.trials;

  with_code(sc.code, beta, [&](auto code) {
    using Code = decltype(code);
    const std::size_t n = code.n();
    out << "scenario family=" << to_string(code.family()) << " n=" << n << " k=" << code.k()
        << " d=" << code.d() << " alpha=" << code.alpha() << " beta=" << code.beta()
        << " B=" << code.message_symbols() << " m=" << code.field().m()
        << " scheme=" << to_string(sc.code.scheme) << " payload_bytes=" << payload_bytes
        << " strategy=" << (sc.forgery ? "forgery" : "random")
        << " policy=" << (sc.adversarial ? "adversarial" : "random") << " seed=" << sc.seed << '\n';
    for (std::size_t t = 0; t < sc.trials; ++t) {
      std::mt19937_64 rng(sc.seed * 0x9E3779B97F4A7C15ull + t);
      std::vector<std::uint8_t> payload = fixed_payload;
      if (!sc.payload_file) {
        payload.resize(payload_bytes);
        std::uniform_int_distribution<int> byte(0, 255);
        for (auto& b : payload) b = static_cast<std::uint8_t>(byte(rng));
      }
      const bool regen = sc.operation != Operation::Reconstruct;
      std::vector<bool> taken(n, false);
      std::optional<std::size_t> failed;
      if (regen) {
        failed = sc.failed.value_or(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
        if (*failed >= n) throw Error(Errc::InvalidParams, "failed node out of range");
      }
      sim::FaultPlan plan;
      plan.seed = rng();
      plan.crashes = sc.crashes;
      plan.byzantine = sc.byzantine;
      for (std::size_t j : plan.crashes)
        if (j < n) taken[j] = true;
      for (std::size_t j : plan.byzantine)
        if (j < n) taken[j] = true;
      if (failed) taken[*failed] = true;
      detail::pick_random(n, sc.crash_count, taken, plan.crashes, rng);
      detail::pick_random(n, sc.byzantine_count, taken, plan.byzantine, rng);
      if (sc.forgery) plan.strategy = sim::ConsistentForgery{sc.forge_row};
      else plan.strategy = sim::RandomCorruption{sc.flip_rate};

      auto cluster = sim::Cluster<Code>::store(code, payload, checksum_codec(sc.code));
      cluster.inject(plan);
      const std::uint64_t order_seed = rng();
      const sim::AccessPolicy policy =
          sc.adversarial ? sim::AccessPolicy{sim::Adversarial{order_seed}} : sim::AccessPolicy{sim::SeededRandom{order_seed}};
      auto record = [&](std::string_view op, const sim::RunMetrics& m, bool success, bool correct) {
        ++summary.runs;
        if (success && correct) ++summary.success;
        else if (success) ++summary.wrong_success;
        else ++summary.fail;
        out << "trial=" << t + 1 << " operation=" << op;
        if (op == "regenerate") out << " failed=" << *failed + 1;
        out << " crashed=" << detail::join_indices(plan.crashes)
            << " byzantine=" << detail::join_indices(plan.byzantine);
        detail::write_metrics(out, m);
        out << " correct=" << (success && correct ? 1 : 0) << '\n';
      };
      if (sc.operation != Operation::Regenerate) {
        const auto run = cluster.run_reconstruction(policy);
        record("reconstruct", run.metrics, run.result.outcome == Outcome::Success, run.correct);
      }
      if (regen) {
        const auto run = cluster.run_regeneration(*failed, policy);
        record("regenerate", run.metrics, run.result.outcome == Outcome::Success, run.exact);
      }
    }
  });
  out << "summary trials=" << summary.trials << " runs=" << summary.runs << " success=" << summary.success
      << " wrong_success=" << summary.wrong_success << " fail=" << summary.fail
      << " success_rate=" << detail::fixed4(summary.success_rate()) << '\n';
  return summary;
}

}  // namespace regen
