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

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "regen/chunk_file.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("regen_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args) const {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = std::string(REGEN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    CliRun r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(log);
    std::ostringstream s;
    s << in.rdbuf();
    r.out = s.str();
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::vector<std::uint8_t> write_payload(const std::string& name, std::size_t len, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    const auto bytes = regen::testing::random_bytes(len, rng);
    regen::io::write_file(path(name), bytes);
    return bytes;
  }

  static std::string chunk_name(std::size_t node) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "node_%03zu.rgen", node);
    return buf;
  }

  fs::path dir_;
};

TEST_F(Cli, EncodeReconstructRoundTrip) {
  struct Case {
    std::string code;
    std::size_t bytes;
  };
  const std::vector<Case> cases{{"--n 6 --k 3", 0},
                                {"--n 6 --k 3", 1},
                                {"--n 6 --k 3 --scheme coded --coded-m 16", 1000},
                                {"--family mbr --n 7 --k 3 --d 5", 257},
                                {"--family mbr --n 8 --k 2 --d 6 --r 16 --m 8", 33},
                                {"--n 12 --k 5 --m 8 --r 8", 500}};
  int i = 0;
  for (const auto& c : cases) {
    const std::string tag = std::to_string(i++);
    const auto payload = write_payload("in" + tag, c.bytes, 51 + i);
    const CliRun enc = run("encode " + c.code + " --input " + path("in" + tag) + " --out " + path("chunks" + tag));
    ASSERT_EQ(enc.status, 0) << enc.out;
    const CliRun rec = run("reconstruct --dir " + path("chunks" + tag) + " --out " + path("out" + tag));
    ASSERT_EQ(rec.status, 0) << rec.out;
    EXPECT_NE(rec.out.find("outcome=SUCCESS"), std::string::npos);
    EXPECT_EQ(regen::io::read_file(path("out" + tag)), payload) << c.code;
  }
}

TEST_F(Cli, CorruptedChunkCostsAnExtraRound) {
  const auto payload = write_payload("in", 300, 60);
  ASSERT_EQ(run("encode --n 6 --k 3 --input " + path("in") + " --out " + path("c")).status, 0);
  const std::string victim = path("c/" + chunk_name(1));
  auto bytes = regen::io::read_file(victim);
  std::mt19937_64 rng(61);
  for (std::size_t i = regen::io::kHeaderBytes; i < regen::io::kHeaderBytes + 204; ++i)
    bytes[i] = static_cast<std::uint8_t>(rng());
  regen::io::write_file(victim, bytes);
  const CliRun rec = run("reconstruct --dir " + path("c") + " --order 1,2,3,4,5,6 --out " + path("out"));
  ASSERT_EQ(rec.status, 0) << rec.out;
  EXPECT_NE(rec.out.find("decode_rounds=2"), std::string::npos) << rec.out;
  EXPECT_EQ(regen::io::read_file(path("out")), payload);
}

TEST_F(Cli, RegenerateRestoresTheExactFile) {
  write_payload("in", 200, 62);
  ASSERT_EQ(run("encode --n 7 --k 3 --scheme coded --coded-m 16 --input " + path("in") + " --out " + path("c")).status,
            0);
  const std::string lost = path("c/" + chunk_name(3));
  const auto original = regen::io::read_file(lost);
  fs::remove(lost);
  // One helper lies about its symbols.
  const std::string liar = path("c/" + chunk_name(6));
  auto bytes = regen::io::read_file(liar);
  for (std::size_t i = regen::io::kHeaderBytes; i < regen::io::kHeaderBytes + 20; ++i) bytes[i] ^= 0x05;
  regen::io::write_file(liar, bytes);
  const CliRun rep = run("regenerate --dir " + path("c") + " --failed 3 --order 6,1,2,4,5,7");
  ASSERT_EQ(rep.status, 0) << rep.out;
  EXPECT_NE(rep.out.find("outcome=SUCCESS"), std::string::npos);
  EXPECT_EQ(regen::io::read_file(lost), original);
}

TEST_F(Cli, TooFewChunksFails) {
  write_payload("in", 50, 63);
  ASSERT_EQ(run("encode --family mbr --n 6 --k 3 --d 4 --input " + path("in") + " --out " + path("c")).status, 0);
  for (std::size_t j : {1, 2, 3, 4}) fs::remove(path("c/" + chunk_name(j)));
  const CliRun rec = run("reconstruct --dir " + path("c") + " --out " + path("out"));
  EXPECT_EQ(rec.status, 1);
  EXPECT_NE(rec.out.find("outcome=FAIL"), std::string::npos) << rec.out;
}

TEST_F(Cli, AnalyzeReferencePoint) {
  const CliRun r = run("analyze --n 100 --k 20 --d 38 --beta 1000 --m 11");
  ASSERT_EQ(r.status, 0) << r.out;
  for (const char* line : {"alpha=19\n", "B=380\n", "byzantine_reconstruction=31\n", "payload_redundancy=0.77%\n",
                           "storage_ratio_replicated=1.52%\n", "bandwidth_ratio_replicated=0.29%\n",
                           "repair_saving=10.00x\n"})
    EXPECT_NE(r.out.find(line), std::string::npos) << line;
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("reconstruct --dir " + path("missing")).status, 2);
  write_payload("in", 10, 64);
  EXPECT_EQ(run("encode --n 6 --k 3 --d 5 --input " + path("in")).status, 2);
  EXPECT_EQ(run("encode --n 6 --k 3 --beta 1 --input " + path("in") + " --out " + path("c")).status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
}

TEST_F(Cli, SimulateSampleScenario) {
  const CliRun r = run(std::string("simulate --config ") + REGEN_SAMPLES_DIR + "/byzantine_msr.cfg --out " + path("rep"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto rep = regen::io::read_file(path("rep"));
  const std::string text(rep.begin(), rep.end());
  EXPECT_NE(text.find("success_rate=1.0000"), std::string::npos) << text;
}

}  // namespace
