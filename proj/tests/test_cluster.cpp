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
#include <optional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "regen/cluster.hpp"
#include "regen/mbr.hpp"
#include "regen/msr.hpp"
#include "test_support.hpp"

namespace {

using regen::ChecksumCodec;
using regen::ChecksumScheme;
using regen::Errc;
using regen::Error;
using regen::Outcome;
using regen::mbr::MbrCode;
using regen::mbr::MbrParams;
using regen::msr::MsrCode;
using regen::msr::MsrParams;
using regen::sim::Adversarial;
using regen::sim::Cluster;
using regen::sim::ConsistentForgery;
using regen::sim::FaultPlan;
using regen::sim::FixedOrder;
using regen::sim::NodeStatus;
using regen::sim::RandomCorruption;
using regen::sim::SeededRandom;
using regen::testing::random_bytes;

template <class Code>
Cluster<Code> fill(const Code& code, std::uint64_t seed, ChecksumScheme scheme = ChecksumScheme::Replicated,
                   std::optional<unsigned> share_bits = std::nullopt) {
  std::mt19937_64 rng(seed);
  const std::size_t capacity = (code.message_symbols() * code.beta() * code.field().m() - 32) / 8;
  return Cluster<Code>::store(code, random_bytes(capacity, rng), ChecksumCodec(scheme, code.n(), {}, share_bits));
}

MsrCode msr(std::size_t n, std::size_t k, std::size_t beta) { return MsrCode(MsrParams{n, k, 2 * k - 2, beta}); }
MbrCode mbr(std::size_t n, std::size_t k, std::size_t d, std::size_t beta) {
  return MbrCode(MbrParams{n, k, d, beta});
}

std::vector<std::vector<std::size_t>> all_orders(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(order);
  while (std::next_permutation(order.begin(), order.end()));
  return out;
}

TEST(Cluster, FaultFreeReconstructionReadsKChunks) {
  const auto c = fill(msr(6, 3, 8), 1);
  const auto run = c.run_reconstruction(SeededRandom{5});
  EXPECT_EQ(run.result.outcome, Outcome::Success);
  EXPECT_TRUE(run.correct);
  EXPECT_TRUE(run.result.fast_path);
  EXPECT_EQ(run.metrics.nodes_contacted, 3u);
  EXPECT_EQ(run.metrics.symbols_downloaded, 3u * 2u * 8u);
  EXPECT_EQ(run.metrics.decode_rounds, 1u);
  EXPECT_EQ(run.metrics.outcome, Outcome::Success);
  EXPECT_EQ(run.payload.size(), c.payload_bytes());
}

TEST(Cluster, FaultFreeRegenerationDownloadsDBeta) {
  for (auto scheme : {ChecksumScheme::Replicated, ChecksumScheme::RsCoded}) {
    const auto c = fill(msr(7, 3, 8), 2, scheme, scheme == ChecksumScheme::RsCoded ? std::optional<unsigned>(16)
                                                                                   : std::nullopt);
    for (std::size_t failed = 0; failed < 7; ++failed) {
      const auto run = c.run_regeneration(failed, SeededRandom{failed});
      ASSERT_TRUE(run.exact);
      EXPECT_EQ(run.metrics.nodes_contacted, 4u);
      EXPECT_EQ(run.metrics.symbols_downloaded, 4u * 8u);
      EXPECT_EQ(run.metrics.checksum_symbols_downloaded, 4u);
      EXPECT_EQ(run.metrics.checksum_bits_downloaded, 4u * (scheme == ChecksumScheme::RsCoded ? 16u : 32u));
    }
  }
  const auto m = fill(mbr(6, 3, 4, 4), 3);
  const auto run = m.run_regeneration(2, SeededRandom{1});
  EXPECT_TRUE(run.exact);
  EXPECT_EQ(run.metrics.symbols_downloaded, 4u * 4u);
}

TEST(Cluster, RunsAreDeterministicForASeed) {
  auto a = fill(msr(7, 3, 6), 4), b = fill(msr(7, 3, 6), 4);
  const FaultPlan plan{{0}, {3, 5}, RandomCorruption{0.5}, 99};
  a.inject(plan);
  b.inject(plan);
  for (std::size_t j = 0; j < 7; ++j) ASSERT_EQ(a.chunk(j), b.chunk(j));
  const auto ra = a.run_reconstruction(SeededRandom{8}), rb = b.run_reconstruction(SeededRandom{8});
  EXPECT_EQ(ra.metrics, rb.metrics);
  EXPECT_EQ(ra.payload, rb.payload);
  EXPECT_EQ(a.access_order(Adversarial{3}), b.access_order(Adversarial{3}));
  EXPECT_NE(a.access_order(SeededRandom{1}), a.access_order(SeededRandom{2}));
}

TEST(Cluster, CrashedNodesAreNeverContacted) {
  auto c = fill(msr(6, 3, 4), 5);
  c.inject(FaultPlan{{0, 2, 4}, {}, RandomCorruption{}, 1});
  EXPECT_EQ(c.nodes_with(NodeStatus::Crashed), (std::vector<std::size_t>{0, 2, 4}));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto order = c.access_order(SeededRandom{seed});
    std::sort(order.begin(), order.end());
    ASSERT_EQ(order, (std::vector<std::size_t>{1, 3, 5}));
  }
  EXPECT_EQ(c.access_order(FixedOrder{{5, 0, 1}}), (std::vector<std::size_t>{5, 1}));
  EXPECT_THROW((void)c.access_order(FixedOrder{{1, 1}}), Error);
  // n - k crashes: reconstruction still succeeds from the survivors.
  const auto run = c.run_reconstruction(SeededRandom{3});
  EXPECT_TRUE(run.correct);
}

TEST(Cluster, ErasureLimitsForRegeneration) {
  // [7,3,4]: 6 helpers, d = 4, so 2 more crashes leave exactly d.
  for (std::size_t extra = 0; extra <= 3; ++extra) {
    auto c = fill(msr(7, 3, 4), 6);
    std::vector<std::size_t> crashes{0};
    for (std::size_t i = 0; i < extra; ++i) crashes.push_back(6 - i);
    c.inject(FaultPlan{crashes, {}, RandomCorruption{}, 1});
    const auto run = c.run_regeneration(0, SeededRandom{1});
    if (extra <= 2) {
      EXPECT_TRUE(run.exact) << extra;
    } else {
      EXPECT_EQ(run.result.outcome, Outcome::ClusterExhausted);
      EXPECT_EQ(run.metrics.nodes_contacted, 3u);
    }
  }
}

TEST(Cluster, OverlappingFaultSetsAreRejected) {
  auto c = fill(msr(6, 3, 4), 7);
  try {
    c.inject(FaultPlan{{1, 2}, {2}, RandomCorruption{}, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::OverlappingSets);
  }
  EXPECT_THROW(c.inject(FaultPlan{{6}, {}, RandomCorruption{}, 1}), Error);
}

TEST(Cluster, AdversarialOrderPutsLiarsFirst) {
  auto c = fill(msr(8, 3, 4), 8);
  c.inject(FaultPlan{{2}, {1, 6}, RandomCorruption{}, 4});
  const auto order = c.access_order(Adversarial{9});
  ASSERT_EQ(order.size(), 7u);
  std::vector<std::size_t> head(order.begin(), order.begin() + 2);
  std::sort(head.begin(), head.end());
  EXPECT_EQ(head, (std::vector<std::size_t>{1, 6}));
}

TEST(Cluster, CorruptionRateZeroIsHarmless) {
  auto c = fill(msr(6, 3, 4), 9);
  c.inject(FaultPlan{{}, {1, 2}, RandomCorruption{0.0}, 1});
  for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(c.chunk(j), c.original_chunk(j));
  auto d = fill(msr(6, 3, 4), 9);
  d.inject(FaultPlan{{}, {1}, RandomCorruption{1.0}, 1});
  for (std::size_t i = 0; i < d.chunk(1).symbols.size(); ++i)
    EXPECT_NE(d.chunk(1).symbols[i], d.original_chunk(1).symbols[i]);
  EXPECT_NE(d.directory().held_by(1), fill(msr(6, 3, 4), 9).directory().held_by(1));
}

TEST(Cluster, OneLiarNeedsAtMostDPlusTwoNodes) {
  for (std::size_t liar = 0; liar < 6; ++liar)
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto c = fill(msr(6, 3, 4), 10 + seed);
      c.inject(FaultPlan{{}, {liar}, RandomCorruption{}, seed});
      const auto run = c.run_reconstruction(Adversarial{seed});
      ASSERT_TRUE(run.correct);
      ASSERT_LE(run.metrics.nodes_contacted, 6u);
      ASSERT_EQ(run.metrics.decode_rounds, 2u);
    }
}

TEST(Cluster, RestoreBringsBackTheNode) {
  auto c = fill(msr(7, 3, 4), 11, ChecksumScheme::RsCoded, 16);
  c.inject(FaultPlan{{3}, {}, RandomCorruption{}, 1});
  const auto run = c.run_regeneration(3, SeededRandom{2});
  ASSERT_TRUE(run.exact);
  const auto held = c.directory().held_by(3);
  c.restore(3, run.result.chunk);
  EXPECT_EQ(c.status(3), NodeStatus::Healthy);
  EXPECT_EQ(c.chunk(3), c.original_chunk(3));
  EXPECT_EQ(c.directory().held_by(3), held);
  EXPECT_THROW(c.restore(2, run.result.chunk), Error);
  const auto back = c.run_reconstruction(FixedOrder{{3, 0, 1}});
  EXPECT_TRUE(back.correct);
}

TEST(Cluster, ByzantineHelperDuringRegeneration) {
  // [7,3,4] MSR, coded m' = 16: one liar among 6 helpers, every order.
  auto c = fill(msr(7, 3, 4), 12, ChecksumScheme::RsCoded, 16);
  c.inject(FaultPlan{{0}, {4}, RandomCorruption{}, 5});
  std::size_t runs = 0;
  for (auto order : all_orders(7)) {
    if (order[0] != 0) continue;
    order.erase(order.begin());
    const auto run = c.run_regeneration(0, FixedOrder{order});
    ASSERT_TRUE(run.exact);
    ++runs;
  }
  EXPECT_EQ(runs, 720u);
}

TEST(Cluster, SelfRepairIsRejected) {
  const auto c = fill(msr(6, 3, 4), 13);
  EXPECT_THROW((void)c.run_regeneration(6, SeededRandom{}), Error);
}

struct ForgeryCount {
  std::size_t wrong = 0;
  std::size_t runs = 0;
};

template <class Code>
ForgeryCount forge_all_orders(const Code& code, const std::vector<std::size_t>& colluders) {
  auto c = fill(code, 14);
  c.inject(FaultPlan{{}, colluders, ConsistentForgery{0}, 21});
  ForgeryCount out;
  for (const auto& order : all_orders(code.n())) {
    const auto run = c.run_reconstruction(FixedOrder{order});
    out.wrong += run.result.outcome == Outcome::Success && !run.correct;
    ++out.runs;
  }
  return out;
}

TEST(Forgery, MsrThresholdIsSharp) {
  // [6,3,4]: b = ceil((n-d+2)/2) = 2 colluders suffice, 1 does not.
  const MsrCode code = msr(6, 3, 16);
  const auto two = forge_all_orders(code, {4, 5});
  EXPECT_EQ(two.runs, 720u);
  EXPECT_GT(two.wrong, 0u);
  for (std::size_t liar = 0; liar < 6; ++liar) EXPECT_EQ(forge_all_orders(code, {liar}).wrong, 0u) << liar;
}

TEST(Forgery, MbrFastPathHasNoRedundancy) {
  // [6,3,4] MBR decodes k chunks with the [n,k] code, so a single colluder
  // read together with the k-1 anchor nodes already yields a consistent
  // forged codeword.
  const MbrCode code = mbr(6, 3, 4, 16);
  EXPECT_GT(forge_all_orders(code, {5}).wrong, 0u);
  EXPECT_GT(forge_all_orders(code, {4, 5}).wrong, 0u);
  // With every node read, the honest majority wins again.
  auto c = fill(code, 14);
  c.inject(FaultPlan{{}, {5}, ConsistentForgery{0}, 21});
  const auto run = c.run_reconstruction(FixedOrder{{1, 2, 3, 4, 5, 0}});
  EXPECT_TRUE(run.correct);
}

TEST(Forgery, ForgedFileKeepsAValidCrc) {
  const MsrCode code = msr(6, 3, 16);
  auto c = fill(code, 15);
  c.inject(FaultPlan{{}, {4, 5}, ConsistentForgery{0}, 22});
  std::size_t wrong = 0;
  for (const auto& order : all_orders(6)) {
    const auto run = c.run_reconstruction(FixedOrder{order});
    if (run.result.outcome != Outcome::Success || run.correct) continue;
    ++wrong;
    ASSERT_TRUE(c.layout().verify(run.result.message));
    ASSERT_NE(run.result.message, c.message());
  }
  EXPECT_GT(wrong, 0u);
  // Checksum shares are untouched.
  for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(c.directory().held_by(j), fill(code, 15).directory().held_by(j));
}

TEST(Forgery, NeedsRoomForACrcNeutralShift) {
  // beta * m = 4 * 4 bits of freedom cannot cancel a 32-bit residue.
  auto c = fill(msr(6, 3, 4), 16);
  EXPECT_THROW(c.inject(FaultPlan{{}, {4, 5}, ConsistentForgery{0}, 1}), Error);
}

}  // namespace
