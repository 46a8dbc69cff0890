// Copyright 2026 The qagg Authors
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

// qagg: compile circuits to aggregated pulse programs, or compare strategies
// on generated benchmarks.

#include "qagg/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kRouting = 3, kNonConvergence = 4, kVerification = 5 };

struct Flags {
  std::string strategy = "cls+agg";
  std::string topology;
  int max_width = 4;
  std::string latency = "table";
  std::string latency_table;
  double dt = 0.5;
  double mu_max = 0.02;
  double fidelity = 0.999;
  double max_duration = 2000.0;
  std::uint64_t seed = 1;
  int threads = 0;
  int verify_samples = 10;
  std::string out;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--topology", f.topology, "grid:RxC (default: near-square grid)");
  app->add_option("--max-width", f.max_width, "widest aggregated instruction (q_L)")->check(CLI::Range(2, 10));
  app->add_option("--latency", f.latency, "table or oracle")->check(CLI::IsMember({"table", "oracle"}));
  app->add_option("--latency-table", f.latency_table, "JSON file overriding table entries")
      ->check(CLI::ExistingFile);
  app->add_option("--dt", f.dt, "control step in ns")->check(CLI::PositiveNumber);
  app->add_option("--mu-max", f.mu_max, "coupling bound in GHz")->check(CLI::PositiveNumber);
  app->add_option("--fidelity", f.fidelity, "synthesis and verification threshold")->check(CLI::Range(0.5, 1.0));
  app->add_option("--max-duration", f.max_duration, "longest pulse the oracle searches, in ns")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "seed for placement, optimizer, sampling and generators");
  app->add_option("--threads", f.threads, "oracle workers (0: one per core)")->check(CLI::NonNegativeNumber);
  app->add_option("--verify-samples", f.verify_samples, "instructions to verify")->check(CLI::NonNegativeNumber);
  app->add_option("--out", f.out, "directory for JSON artifacts");
}

qagg::CompileOptions options_from(const Flags& f) {
  qagg::CompileOptions opt;
  opt.strategy = qagg::parse_strategy(f.strategy);
  if (!f.topology.empty()) opt.topology = qagg::Topology::parse(f.topology);
  opt.max_width = f.max_width;
  opt.latency = f.latency == "oracle" ? qagg::LatencyMode::Oracle : qagg::LatencyMode::Table;
  if (!f.latency_table.empty()) {
    qagg::LatencyModel lat = qagg::LatencyModel::table(opt.table);
    lat.merge_table_file(f.latency_table);
    opt.table = lat.entries();
  }
  opt.model.dt_ns = f.dt;
  opt.model.mu_max_ghz = f.mu_max;
  opt.min_time.optimizer.fidelity_threshold = f.fidelity;
  opt.min_time.cap_ns = f.max_duration;
  opt.seed = f.seed;
  opt.threads = f.threads;
  opt.verify_samples = f.verify_samples;
  return opt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qagg::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_compile(const std::string& input, const Flags& f) {
  const std::string text = read_file(input);
  qagg::Circuit c;
  try {
    c = qagg::parse_asm(text);
  } catch (const qagg::ParseError& e) {
    std::cerr << input << ": " << e.what() << "\n";
    return kParse;
  }
  const qagg::CompileOptions opt = options_from(f);
  const qagg::CompileResult r = qagg::compile(c, opt);
  std::cout << qagg::summary_text(r);
  if (!f.out.empty()) {
    qagg::write_artifacts(r, text, opt, f.out);
    std::cout << "artifacts written to " << f.out << "\n";
  }
  return r.verification && !r.verification->pass ? kVerification : kOk;
}

int run_bench(const std::string& name, int n, const Flags& f) {
  const qagg::Circuit c = qagg::generate_benchmark(name, n, f.seed);
  const auto rows = qagg::bench(c, options_from(f));
  std::cout << name << " n=" << c.num_qubits << " (" << c.size() << " gates)\n" << qagg::bench_text(rows);
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    std::ofstream(std::filesystem::path(f.out) / "bench.json")
        << nlohmann::json{{"benchmark", name}, {"n", c.num_qubits}, {"rows", qagg::bench_json(rows)}}.dump(2) << "\n";
  }
  for (const auto& r : rows) {
    if (!r.verified) return kVerification;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregated-instruction compiler for superconducting qubits"};
  app.require_subcommand(1);
  Flags f;

  std::string input;
  CLI::App* compile = app.add_subcommand("compile", "compile an assembly file");
  compile->add_option("file", input, "input .asm file")->required();
  compile->add_option("--strategy", f.strategy, "isa, cls, agg or cls+agg")
      ->check(CLI::IsMember({"isa", "cls", "agg", "cls+agg"}));
  add_common(compile, f);

  std::string bench_name;
  int bench_n = 6;
  int bench_max_n = 8;
  CLI::App* bench = app.add_subcommand("bench", "compare all strategies on a generated circuit");
  bench->add_option("name", bench_name, "benchmark generator")->required()->check(
      CLI::IsMember(qagg::benchmark_names()));
  bench->add_option("--n", bench_n, "number of qubits")->check(CLI::PositiveNumber);
  bench->add_option("--max-n", bench_max_n, "largest accepted --n")->check(CLI::PositiveNumber);
  add_common(bench, f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile->parsed()) return run_compile(input, f);
    if (bench_n > bench_max_n) {
      std::cerr << "bench: --n " << bench_n << " exceeds --max-n " << bench_max_n << "\n";
      return kFailure;
    }
    return run_bench(bench_name, bench_n, f);
  } catch (const qagg::RoutingError& e) {
    std::cerr << "routing: " << e.what() << "\n";
    return kRouting;
  } catch (const qagg::optctrl::NonConvergenceError& e) {
    std::cerr << "optimal control: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const qagg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
