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

// regen: store files as regenerating-code chunks, rebuild them, and run
// fault-injection scenarios against an in-memory cluster.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regen/regen.hpp"

namespace fs = std::filesystem;
using namespace regen;

namespace {

struct CodeFlags {
  std::string family = "msr";
  std::size_t n = 6, k = 3, d = 0, beta = 0, coded_m = 0;
  unsigned m = 0, r = 32;
  std::string scheme = "replicated";
  CLI::Option* d_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* coded_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "Code family")->check(CLI::IsMember({"msr", "mbr"}));
    app->add_option("--n", n, "Number of storage nodes");
    app->add_option("--k", k, "Nodes needed to reconstruct");
    d_opt = app->add_option("--d", d, "Helpers contacted per repair (MSR: 2k-2)");
    beta_opt = app->add_option("--beta", beta, "Stripes per node (default: smallest that fits)");
    m_opt = app->add_option("--m", m, "Field degree, GF(2^m)");
    app->add_option("--r", r, "CRC width in bits (8, 16 or 32)");
    app->add_option("--scheme", scheme, "Checksum distribution")->check(CLI::IsMember({"replicated", "coded"}));
    coded_opt = app->add_option("--coded-m", coded_m, "Symbol width m' of the coded checksum scheme");
  }

  CodeSpec spec() const {
    CodeSpec s;
    s.family = family == "msr" ? Family::Msr : Family::Mbr;
    s.n = n;
    s.k = k;
    if (d_opt->count()) s.d = d;
    if (beta_opt->count()) s.beta = beta;
    if (m_opt->count()) s.m = m;
    s.r = r;
    s.scheme = scheme == "coded" ? ChecksumScheme::RsCoded : ChecksumScheme::Replicated;
    if (coded_opt->count()) s.share_bits = static_cast<unsigned>(coded_m);
    if (s.k < 1 || s.n < 2) throw Error(Errc::Usage, "need n >= 2 and k >= 1");
    return s;
  }
};

std::string node_file(const std::string& dir, std::size_t node) {
  char name[32];
  std::snprintf(name, sizeof name, "node_%03zu.rgen", node + 1);
  return (fs::path(dir) / name).string();
}

std::vector<std::size_t> parse_order(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t v = 0;
    try {
      v = std::stoul(item);
    } catch (const std::exception&) {
      throw Error(Errc::Usage, "bad node index '" + item + "' in --order");
    }
    if (v == 0) throw Error(Errc::Usage, "node indices start at 1");
    out.push_back(v - 1);
  }
  return out;
}

/// Every chunk in a directory, all from the same encode.
struct ChunkSet {
  io::ChunkHeader header;
  std::map<std::size_t, io::ChunkFile> files;  // by 0-based node
};

ChunkSet load_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::Usage, dir + " is not a directory");
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".rgen") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  ChunkSet set;
  for (const auto& p : paths) {
    const std::vector<std::uint8_t> bytes = io::read_file(p.string());
    io::ChunkFile f;
    try {
      f = io::parse(bytes);
    } catch (const Error& e) {
      throw Error(e.code(), p.filename().string() + ": " + e.what());
    }
    if (set.files.empty()) set.header = f.header;
    else if (!set.header.same_file(f.header))
      throw Error(Errc::MalformedChunk, p.filename().string() + " belongs to a different encode");
    const std::size_t node = f.header.node - 1u;
    if (set.files.count(node)) throw Error(Errc::MalformedChunk, "two chunks claim node " + std::to_string(node + 1));
    set.files.emplace(node, std::move(f));
  }
  if (set.files.empty()) throw Error(Errc::Usage, "no .rgen chunks in " + dir);
  return set;
}

std::vector<std::size_t> contact_order(const std::vector<std::size_t>& available, const std::string& order_text,
                                       std::uint64_t seed) {
  if (!order_text.empty()) {
    std::vector<std::size_t> order;
    for (std::size_t j : parse_order(order_text))
      if (std::find(available.begin(), available.end(), j) != available.end()) order.push_back(j);
    return order;
  }
  std::vector<std::size_t> order = available;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

struct FileChunks {
  const ChunkSet* set;
  std::vector<std::size_t> order;
  std::size_t next = 0;
  sim::RunMetrics metrics;

  std::vector<NodeChunk> fetch(std::size_t count) {
    std::vector<NodeChunk> out;
    while (count-- > 0 && next < order.size()) {
      const io::ChunkFile& f = set->files.at(order[next++]);
      out.push_back(NodeChunk{f.header.node - 1u, f.header.alpha(), f.symbols});
      ++metrics.nodes_contacted;
      metrics.symbols_downloaded += f.symbols.size();
    }
    return out;
  }
};

template <class Code>
struct FileRepairs {
  const ChunkSet* set;
  const Code* code;
  std::size_t failed;
  unsigned share_bits;
  std::vector<std::size_t> order;
  std::size_t next = 0;
  sim::RunMetrics metrics;

  std::vector<RepairReply> fetch(std::size_t count) {
    std::vector<RepairReply> out;
    while (count-- > 0 && next < order.size()) {
      const io::ChunkFile& f = set->files.at(order[next++]);
      const std::size_t node = f.header.node - 1u;
      RepairReply reply{node, code->repair_response(NodeChunk{node, f.header.alpha(), f.symbols}, failed),
                        f.shares.at(ChecksumCodec::peer_position(node, failed))};
      ++metrics.nodes_contacted;
      metrics.symbols_downloaded += reply.symbols.size();
      ++metrics.checksum_symbols_downloaded;
      metrics.checksum_bits_downloaded += share_bits;
      out.push_back(std::move(reply));
    }
    return out;
  }
};

void print_metrics(std::ostream& out, const sim::RunMetrics& m) {
  out << "outcome=" << to_string(m.outcome) << '\n'
      << "nodes_contacted=" << m.nodes_contacted << '\n'
      << "symbols_downloaded=" << m.symbols_downloaded << '\n'
      << "checksum_shares_downloaded=" << m.checksum_symbols_downloaded << '\n'
      << "checksum_bits_downloaded=" << m.checksum_bits_downloaded << '\n'
      << "decode_rounds=" << m.decode_rounds << '\n';
}

void print_code(std::ostream& out, const io::ChunkHeader& h) {
  out << "family=" << to_string(h.family) << "\nn=" << h.n << "\nk=" << h.k << "\nd=" << h.d
      << "\nalpha=" << h.alpha() << "\nbeta=" << h.beta << "\nm=" << h.field.m << "\nr=" << unsigned(h.r)
      << "\nscheme=" << to_string(h.scheme) << '\n';
}

int cmd_encode(const CodeSpec& spec, const std::string& input, const std::string& out_dir) {
  const std::vector<std::uint8_t> payload = io::read_file(input);
  const std::size_t beta = stripes_for(spec, payload.size());
  return with_code(spec, beta, [&](const auto& code) {
    MessageLayout layout(code.field().m(), code.message_symbols(), code.beta(), crc_for_width(spec.r));
    const std::vector<gf::Element> message = layout.pack(payload);
    const std::vector<NodeChunk> chunks = code.encode(message);
    std::vector<std::vector<gf::Element>> symbols;
    for (const auto& c : chunks) symbols.push_back(c.symbols);
    const ChecksumDirectory dir = build_directory(symbols, code.field().m(), checksum_codec(spec));
    fs::create_directories(out_dir);
    io::ChunkHeader h = header_for(spec, beta, payload.size());
    for (std::size_t j = 0; j < code.n(); ++j) {
      h.node = static_cast<std::uint16_t>(j + 1);
      const io::ChunkFile f{h, chunks[j].symbols, dir.held_by(j)};
      io::write_file(node_file(out_dir, j), io::serialize(f));
    }
    print_code(std::cout, h);
    std::cout << "B=" << code.message_symbols() << "\npayload_bytes=" << payload.size()
              << "\ncapacity_bytes=" << layout.max_payload_bytes() << "\nchunks_written=" << code.n()
              << "\nsymbols_per_node=" << code.alpha() * code.beta()
              << "\nchecksum_bits_per_node=" << dir.storage_bits_per_node() << "\nout=" << out_dir << '\n';
    return 0;
  });
}

int cmd_reconstruct(const std::string& dir, const std::string& out, const std::string& order_text,
                    std::uint64_t seed) {
  const ChunkSet set = load_dir(dir);
  const CodeSpec spec = spec_from_header(set.header);
  return with_code(spec, set.header.beta, [&](const auto& code) {
    MessageLayout layout(code.field().m(), code.message_symbols(), code.beta(), crc_for_width(spec.r));
    std::vector<std::size_t> available;
    for (const auto& [node, f] : set.files) available.push_back(node);
    FileChunks source{&set, contact_order(available, order_text, seed), 0, {}};
    const ReconstructionResult result = code.reconstruct(layout, source);
    source.metrics.decode_rounds = result.rounds;
    source.metrics.outcome = result.outcome;
    print_code(std::cout, set.header);
    std::cout << "chunks_available=" << available.size() << '\n';
    print_metrics(std::cout, source.metrics);
    std::cout << "fast_path=" << (result.fast_path ? 1 : 0) << '\n';
    if (result.outcome != Outcome::Success) return 1;
    const std::vector<std::uint8_t> payload = layout.unpack(result.message, set.header.payload_bytes);
    std::cout << "payload_bytes=" << payload.size() << '\n';
    if (!out.empty()) {
      io::write_file(out, payload);
      std::cout << "out=" << out << '\n';
    }
    return 0;
  });
}

int cmd_regenerate(const std::string& dir, std::size_t failed_1based, std::string out, const std::string& order_text,
                   std::uint64_t seed) {
  const ChunkSet set = load_dir(dir);
  const CodeSpec spec = spec_from_header(set.header);
  if (failed_1based < 1 || failed_1based > set.header.n) throw Error(Errc::Usage, "--failed must be in [1, n]");
  const std::size_t failed = failed_1based - 1;
  return with_code(spec, set.header.beta, [&](const auto& code) {
    using Code = std::decay_t<decltype(code)>;
    const ChecksumCodec checksums = checksum_codec(spec);
    std::vector<std::size_t> available;
    for (const auto& [node, f] : set.files)
      if (node != failed) available.push_back(node);
    FileRepairs<Code> source{&set, &code, failed, checksums.share_bits(), contact_order(available, order_text, seed), 0, {}};
    const RegenerationResult result = regenerate(code, failed, checksums, source);
    source.metrics.decode_rounds = result.rounds;
    source.metrics.outcome = result.outcome;
    print_code(std::cout, set.header);
    std::cout << "failed=" << failed + 1 << '\n';
    print_metrics(std::cout, source.metrics);
    if (result.outcome != Outcome::Success) return 1;

    // The newcomer also needs the shares the lost node held.
    std::vector<std::uint32_t> held(code.n() - 1);
    for (std::size_t subject = 0; subject < code.n(); ++subject) {
      if (subject == failed) continue;
      std::vector<std::pair<std::size_t, std::uint32_t>> responses;
      for (const auto& [holder, f] : set.files)
        if (holder != subject && holder != failed)
          responses.emplace_back(holder, f.shares.at(ChecksumCodec::peer_position(holder, subject)));
      const std::uint32_t checksum = checksums.recover(responses, subject);
      held[ChecksumCodec::peer_position(failed, subject)] =
          checksums.encode(checksum)[ChecksumCodec::peer_position(subject, failed)];
    }
    io::ChunkHeader h = set.header;
    h.node = static_cast<std::uint16_t>(failed + 1);
    if (out.empty()) out = node_file(dir, failed);
    io::write_file(out, io::serialize(io::ChunkFile{h, result.chunk.symbols, held}));
    std::cout << "out=" << out << '\n';
    return 0;
  });
}

int cmd_simulate(const std::string& config, std::string out, bool seed_set, std::uint64_t seed) {
  const std::vector<std::uint8_t> text = io::read_file(config);
  Scenario sc = parse_scenario(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
  if (seed_set) sc.seed = seed;
  if (out.empty() && sc.output) out = *sc.output;
  SimulationSummary summary;
  if (out.empty()) {
    summary = simulate(sc, std::cout);
  } else {
    std::ofstream file(out);
    if (!file) throw Error(Errc::Usage, "cannot write " + out);
    summary = simulate(sc, file);
    std::cout << "summary trials=" << summary.trials << " runs=" << summary.runs << " success=" << summary.success
              << " wrong_success=" << summary.wrong_success << " fail=" << summary.fail << "\nout=" << out << '\n';
  }
  return summary.fail == 0 && summary.wrong_success == 0 ? 0 : 1;
}

int cmd_analyze(CodeSpec spec) {
  const std::size_t beta = spec.beta.value_or(1);
  const unsigned m = field_for(spec).m;
  const analysis::CodePoint point =
      analysis::make_point(spec.family, static_cast<std::int64_t>(spec.n), static_cast<std::int64_t>(spec.k),
                           static_cast<std::int64_t>(spec.repair_degree()), static_cast<std::int64_t>(beta), m,
                           spec.r, spec.share_bits, spec.scheme);
  std::cout << analysis::render(analysis::capability_table(point));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-tolerant exact-regenerating storage codes"};
  app.require_subcommand(1);

  CodeFlags enc_flags, ana_flags;
  std::string input, out_dir = "chunks";
  auto* enc = app.add_subcommand("encode", "Encode a file into n chunk files");
  enc_flags.attach(enc);
  enc->add_option("--input", input, "File to store")->required();
  enc->add_option("--out", out_dir, "Output directory");

  std::string rec_dir, rec_out, rec_order;
  std::uint64_t rec_seed = 1;
  auto* rec = app.add_subcommand("reconstruct", "Rebuild the stored file from a chunk directory");
  rec->add_option("--dir", rec_dir, "Chunk directory")->required();
  rec->add_option("--out", rec_out, "Where to write the payload");
  rec->add_option("--order", rec_order, "Contact order, comma-separated 1-based node indices");
  rec->add_option("--seed", rec_seed, "Seed for the random contact order");

  std::string gen_dir, gen_out, gen_order;
  std::size_t gen_failed = 0;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("regenerate", "Rebuild one node's chunk from its peers");
  gen->add_option("--dir", gen_dir, "Chunk directory")->required();
  gen->add_option("--failed", gen_failed, "1-based index of the node to rebuild")->required();
  gen->add_option("--out", gen_out, "Output chunk path (default: its slot in --dir)");
  gen->add_option("--order", gen_order, "Helper order, comma-separated 1-based node indices");
  gen->add_option("--seed", gen_seed, "Seed for the random helper order");

  std::string sim_config, sim_out;
  std::uint64_t sim_seed = 1;
  auto* simc = app.add_subcommand("simulate", "Run a fault-injection scenario");
  simc->add_option("--config", sim_config, "Scenario file (key = value lines)")->required();
  simc->add_option("--out", sim_out, "Report path (default: stdout)");
  auto* sim_seed_opt = simc->add_option("--seed", sim_seed, "Override the scenario seed");

  auto* ana = app.add_subcommand("analyze", "Print parameters, fault tolerance and overheads");
  ana_flags.attach(ana);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (enc->parsed()) return cmd_encode(enc_flags.spec(), input, out_dir);
    if (rec->parsed()) return cmd_reconstruct(rec_dir, rec_out, rec_order, rec_seed);
    if (gen->parsed()) return cmd_regenerate(gen_dir, gen_failed, gen_out, gen_order, gen_seed);
    if (simc->parsed()) return cmd_simulate(sim_config, sim_out, sim_seed_opt->count() > 0, sim_seed);
    if (ana->parsed()) return cmd_analyze(ana_flags.spec());
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
