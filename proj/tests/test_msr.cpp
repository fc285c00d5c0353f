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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "regen/integrity.hpp"
#include "regen/layout.hpp"
#include "regen/matrix.hpp"
#include "regen/msr.hpp"
#include "test_support.hpp"

namespace {

using regen::ChecksumCodec;
using regen::ChecksumScheme;
using regen::Error;
using regen::Errc;
using regen::Matrix;
using regen::MessageLayout;
using regen::NodeChunk;
using regen::Outcome;
using regen::RepairReply;
using regen::gf::Element;
using regen::gf::Field;
using regen::msr::MsrCode;
using regen::msr::MsrParams;
using regen::testing::ListRepairSource;
using regen::testing::ListSource;
using regen::testing::random_bytes;
using regen::testing::random_symbols;

MsrCode make(std::size_t n, std::size_t k, std::size_t beta, unsigned m = 4) {
  return MsrCode(MsrParams{n, k, 2 * k - 2, beta, regen::gf::FieldParams::defaults(m)});
}

// Symmetric alpha x alpha matrix filled row by row along the upper triangle.
Matrix symmetric_from(std::span<const Element> v, std::size_t a) {
  Matrix s(a, a);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = i; j < a; ++j) s(i, j) = s(j, i) = v[idx++];
  return s;
}

std::vector<Element> powers(const Field& f, Element x, std::size_t len) {
  std::vector<Element> v(len);
  Element acc(1);
  for (auto& e : v) {
    e = acc;
    acc = f.mul(acc, x);
  }
  return v;
}

TEST(MsrFill, UpperTrianglesRowByRow) {
  for (std::size_t k = 2; k <= 7; ++k) {
    const MsrCode code = make(2 * k - 1, k, 1, 8);
    const std::size_t a = k - 1;
    std::vector<Element> msg(code.message_symbols());
    for (std::size_t i = 0; i < msg.size(); ++i) msg[i] = Element(static_cast<std::uint32_t>(i + 1));
    const Matrix u = code.build_u(msg);
    const std::size_t half = a * (a + 1) / 2;
    const Matrix a1 = symmetric_from(std::span<const Element>(msg).subspan(0, half), a);
    const Matrix a2 = symmetric_from(std::span<const Element>(msg).subspan(half, half), a);
    for (std::size_t r = 0; r < a; ++r)
      for (std::size_t c = 0; c < a; ++c) {
        ASSERT_EQ(u(r, c), a1(r, c));
        ASSERT_EQ(u(r, c + a), a2(r, c));
      }
    EXPECT_EQ(code.read_u(u), msg);
  }
}

TEST(MsrFill, SmallestExample) {
  // alpha = 2: A1 = [[m1, m2], [m2, m3]], A2 = [[m4, m5], [m5, m6]].
  const MsrCode code = make(6, 3, 1);
  std::vector<Element> msg;
  for (std::uint32_t v = 1; v <= 6; ++v) msg.push_back(Element(v));
  const Matrix u = code.build_u(msg);
  const std::vector<std::uint32_t> expect{1, 2, 4, 5, 2, 3, 5, 6};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(u(i / 4, i % 4).value(), expect[i]);
}

TEST(MsrEncode, ChunkIsA1gPlusLambdaA2g) {
  const MsrCode code = make(9, 4, 3, 8);
  const Field& f = code.field();
  std::mt19937_64 rng(11);
  const auto msg = random_symbols(f, code.message_symbols() * 3, rng);
  const auto chunks = code.encode(msg);
  const std::size_t a = code.alpha(), half = a * (a + 1) / 2;
  for (std::size_t s = 0; s < 3; ++s) {
    const auto stripe = std::span<const Element>(msg).subspan(s * code.message_symbols(), code.message_symbols());
    const Matrix a1 = symmetric_from(stripe.subspan(0, half), a);
    const Matrix a2 = symmetric_from(stripe.subspan(half, half), a);
    for (std::size_t j = 0; j < code.n(); ++j) {
      const Element x = f.exp(static_cast<std::int64_t>(j));
      const Element lambda = f.pow(x, static_cast<std::int64_t>(a));
      ASSERT_EQ(code.lambda(j), lambda);
      const auto g = powers(f, x, a);
      for (std::size_t r = 0; r < a; ++r) {
        Element want;
        for (std::size_t c = 0; c < a; ++c) want += f.mul(a1(r, c), g[c]) + f.mul(lambda, f.mul(a2(r, c), g[c]));
        ASSERT_EQ(chunks[j].stripe(s)[r], want);
      }
    }
  }
}

TEST(MsrEncode, RejectsBadParameters) {
  auto code_of = [](MsrParams p) { return [p] { MsrCode c(p); }; };
  EXPECT_THROW(code_of(MsrParams{6, 3, 5, 1})(), Error);
  EXPECT_THROW(code_of(MsrParams{4, 3, 4, 1})(), Error);
  EXPECT_THROW(code_of(MsrParams{6, 3, 4, 0})(), Error);
  EXPECT_THROW(code_of(MsrParams{3, 1, 0, 1})(), Error);
  EXPECT_THROW(code_of(MsrParams{16, 3, 4, 1})(), Error);
  const MsrCode ok = make(6, 3, 2);
  EXPECT_THROW((void)ok.encode(std::vector<Element>(11)), Error);
}

TEST(MsrEncode, LambdaCollisionIsRejected) {
  // alpha = 3 over GF(16): a^(3j) repeats after j = 5.
  try {
    (void)make(7, 4, 1, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidParams);
  }
  EXPECT_NO_THROW((void)make(7, 4, 1, 8));
  EXPECT_NO_THROW((void)make(5, 3, 1, 4));
}

TEST(MsrReconstruct, FastPathFromEveryKSubset) {
  for (const auto& [n, k, m] : {std::tuple{6u, 3u, 4u}, std::tuple{12u, 5u, 8u}, std::tuple{9u, 2u, 4u}}) {
    const MsrCode code = make(n, k, 3, m);
    std::mt19937_64 rng(12);
    const auto msg = random_symbols(code.field(), code.message_symbols() * 3, rng);
    const auto chunks = code.encode(msg);
    regen::testing::for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
      std::vector<NodeChunk> picked;
      for (std::size_t i : idx) picked.push_back(chunks[i]);
      std::shuffle(picked.begin(), picked.end(), rng);
      ASSERT_EQ(code.reconstruct_fast(picked), msg);
    });
  }
}

TEST(MsrReconstruct, FastPathNeedsDistinctNodes) {
  const MsrCode code = make(6, 3, 1);
  std::mt19937_64 rng(13);
  const auto chunks = code.encode(random_symbols(code.field(), 6, rng));
  EXPECT_THROW((void)code.reconstruct_fast(std::vector<NodeChunk>{chunks[0], chunks[0], chunks[1]}), Error);
  EXPECT_THROW((void)code.reconstruct_fast(std::vector<NodeChunk>{chunks[0], chunks[1]}), Error);
}

struct Stored {
  MsrCode code;
  MessageLayout layout;
  std::vector<Element> message;
  std::vector<NodeChunk> chunks;
};

Stored store(std::size_t n, std::size_t k, std::size_t beta, std::uint64_t seed) {
  MsrCode code = make(n, k, beta);
  MessageLayout layout(code.field().m(), code.message_symbols(), beta);
  std::mt19937_64 rng(seed);
  auto message = layout.pack(random_bytes(layout.max_payload_bytes(), rng));
  auto chunks = code.encode(message);
  return {std::move(code), std::move(layout), std::move(message), std::move(chunks)};
}

TEST(MsrReconstruct, OneLiarIsCorrectedWithinDPlusTwoNodes) {
  // [6,3,4]: every access order and every liar.
  const Stored st = store(6, 3, 6, 14);
  std::mt19937_64 rng(15);
  std::vector<std::size_t> order(6);
  std::iota(order.begin(), order.end(), 0);
  std::size_t runs = 0;
  for (std::size_t liar = 0; liar < 6; ++liar) {
    auto chunks = st.chunks;
    for (auto& s : chunks[liar].symbols) s = s + Element(static_cast<std::uint32_t>(1 + rng() % 15));
    std::sort(order.begin(), order.end());
    do {
      ListSource src;
      for (std::size_t j : order) src.chunks.push_back(chunks[j]);
      const auto res = st.code.reconstruct(st.layout, src);
      ASSERT_EQ(res.outcome, Outcome::Success);
      ASSERT_EQ(res.message, st.message);
      const bool early = std::find(order.begin(), order.begin() + 3, liar) != order.begin() + 3;
      ASSERT_EQ(res.fast_path, !early);
      ASSERT_EQ(src.fetched, early ? 6u : 3u);
      ASSERT_EQ(res.rounds, early ? 2u : 1u);
      ++runs;
    } while (std::next_permutation(order.begin(), order.end()));
  }
  EXPECT_EQ(runs, 6u * 720u);
}

TEST(MsrReconstruct, TwoLiarsNeverYieldAWrongMessage) {
  const Stored st = store(6, 3, 6, 16);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    auto chunks = st.chunks;
    const std::size_t a = rng() % 6, b = (a + 1 + rng() % 5) % 6;
    for (std::size_t j : {a, b})
      for (auto& s : chunks[j].symbols) s = s + Element(static_cast<std::uint32_t>(1 + rng() % 15));
    ListSource src{chunks};
    std::shuffle(src.chunks.begin(), src.chunks.end(), rng);
    const auto res = st.code.reconstruct(st.layout, src);
    // Success only through an honest fast path; otherwise the CRC refuses.
    if (res.outcome == Outcome::Success) {
      ASSERT_EQ(res.message, st.message);
      ASSERT_TRUE(res.fast_path);
    } else {
      ASSERT_EQ(res.outcome, Outcome::ClusterExhausted);
    }
  }
}

TEST(MsrReconstruct, LargerCodeCorrectsUpToHalfTheRedundancy) {
  // [15,5,8]: floor((15-8)/2) = 3 liars.
  const MsrCode code = make(15, 5, 4, 8);
  const MessageLayout layout(8, code.message_symbols(), 4);
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 40; ++trial) {
    const auto message = layout.pack(random_bytes(20, rng));
    auto chunks = code.encode(message);
    std::vector<std::size_t> order(15);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t liars = trial % 4;
    for (std::size_t i = 0; i < liars; ++i)
      for (auto& s : chunks[order[i]].symbols) s = s + Element(static_cast<std::uint32_t>(1 + rng() % 255));
    ListSource src;
    for (std::size_t j : order) src.chunks.push_back(chunks[j]);
    const auto res = code.reconstruct(layout, src);
    ASSERT_EQ(res.outcome, Outcome::Success);
    ASSERT_EQ(res.message, message);
    if (liars > 0) {
      EXPECT_LE(src.fetched, code.d() + 2 * liars);
    }
  }
}

TEST(MsrReconstruct, TooFewNodesFails) {
  const Stored st = store(6, 3, 6, 19);
  ListSource src{{st.chunks[0], st.chunks[1]}};
  EXPECT_EQ(st.code.reconstruct(st.layout, src).outcome, Outcome::ClusterExhausted);
}

std::vector<RepairReply> replies_for(const MsrCode& code, const std::vector<NodeChunk>& chunks, std::size_t failed,
                                     const std::vector<std::size_t>& helpers, const ChecksumCodec& codec) {
  const auto shares = codec.encode(regen::node_checksum(chunks[failed].symbols, code.field().m()));
  std::vector<RepairReply> out;
  for (std::size_t h : helpers)
    out.push_back({h, code.repair_response(chunks[h], failed), shares[ChecksumCodec::peer_position(failed, h)]});
  return out;
}

TEST(MsrRegenerate, ExactFromEveryHelperSet) {
  for (const auto& [n, k] : {std::pair{6u, 3u}, std::pair{8u, 3u}, std::pair{9u, 4u}}) {
    const MsrCode code = make(n, k, 3, 8);
    std::mt19937_64 rng(20);
    const auto chunks = code.encode(random_symbols(code.field(), code.message_symbols() * 3, rng));
    const ChecksumCodec codec(ChecksumScheme::Replicated, n);
    for (std::size_t failed = 0; failed < n; ++failed) {
      regen::testing::for_each_subset(n - 1, code.d(), [&](const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> helpers;
        for (std::size_t i : idx) helpers.push_back(i < failed ? i : i + 1);
        ListRepairSource src{replies_for(code, chunks, failed, helpers, codec)};
        const auto res = regen::regenerate(code, failed, codec, src);
        ASSERT_EQ(res.outcome, Outcome::Success);
        ASSERT_EQ(res.chunk, chunks[failed]);
        ASSERT_EQ(res.rounds, 1u);
      });
    }
  }
}

TEST(MsrRegenerate, RepairDownloadIsDBeta) {
  const MsrCode code = make(6, 3, 5);
  std::mt19937_64 rng(21);
  const auto chunks = code.encode(random_symbols(code.field(), code.message_symbols() * 5, rng));
  EXPECT_EQ(code.repair_response(chunks[1], 0).size(), 5u);
  EXPECT_EQ(code.repair_vector(2), powers(code.field(), code.point(2), 2));
  try {
    (void)code.repair_response(chunks[0], 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SelfRepair);
  }
}

TEST(MsrRegenerate, OneLiarAmongHelpersOfSevenThreeFour) {
  // [7,3,4]: 6 helpers, floor((7-1-4)/2) = 1 error correctable.
  const MsrCode code = make(7, 3, 4);
  std::mt19937_64 rng(22);
  const auto chunks = code.encode(random_symbols(code.field(), code.message_symbols() * 4, rng));
  const ChecksumCodec codec(ChecksumScheme::Replicated, 7);
  for (std::size_t failed = 0; failed < 7; ++failed) {
    std::vector<std::size_t> helpers;
    for (std::size_t j = 0; j < 7; ++j)
      if (j != failed) helpers.push_back(j);
    for (std::size_t liar : helpers) {
      std::sort(helpers.begin(), helpers.end());
      do {
        auto replies = replies_for(code, chunks, failed, helpers, codec);
        for (auto& r : replies)
          if (r.node == liar)
            for (auto& s : r.symbols) s = s + Element(static_cast<std::uint32_t>(1 + rng() % 15));
        ListRepairSource src{replies};
        const auto res = regen::regenerate(code, failed, codec, src);
        ASSERT_EQ(res.outcome, Outcome::Success);
        ASSERT_EQ(res.chunk, chunks[failed]);
        const bool early = std::find(helpers.begin(), helpers.begin() + 4, liar) != helpers.begin() + 4;
        ASSERT_EQ(res.rounds, early ? 2u : 1u);
      } while (std::next_permutation(helpers.begin(), helpers.end()));
    }
  }
}

TEST(MsrRegenerate, SixThreeFourCannotAbsorbALiar) {
  // Five helpers, d = 4: the failed node is an erasure, leaving one spare
  // position, which detects but cannot correct.
  const MsrCode code = make(6, 3, 4);
  std::mt19937_64 rng(23);
  const auto chunks = code.encode(random_symbols(code.field(), code.message_symbols() * 4, rng));
  const ChecksumCodec codec(ChecksumScheme::Replicated, 6);
  auto replies = replies_for(code, chunks, 0, {1, 2, 3, 4, 5}, codec);
  for (auto& s : replies[0].symbols) s = s + Element(3);
  ListRepairSource src{replies};
  const auto res = regen::regenerate(code, 0, codec, src);
  EXPECT_EQ(res.outcome, Outcome::ClusterExhausted);
}

TEST(MsrRegenerate, ForgedSharesWithoutMajorityReportChecksumUnrecoverable) {
  const MsrCode code = make(6, 3, 2);
  std::mt19937_64 rng(24);
  const auto chunks = code.encode(random_symbols(code.field(), code.message_symbols() * 2, rng));
  const ChecksumCodec codec(ChecksumScheme::Replicated, 6);
  auto replies = replies_for(code, chunks, 2, {0, 1, 3, 4, 5}, codec);
  for (std::size_t i = 0; i < 5; ++i) replies[i].share = static_cast<std::uint32_t>(i);
  ListRepairSource src{replies};
  EXPECT_EQ(regen::regenerate(code, 2, codec, src).outcome, Outcome::ChecksumUnrecoverable);
}

}  // namespace
