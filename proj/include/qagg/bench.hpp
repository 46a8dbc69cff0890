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

/**
 * @file bench.hpp
 * @brief Benchmark circuit generators and the strategy comparison.
 */

#pragma once

#include "qagg/pipeline.hpp"

#include <random>
#include <set>

namespace qagg {

inline constexpr double kDefaultGamma = 5.67;
inline constexpr double kDefaultBeta = 1.26;

using EdgeList = std::vector<std::pair<int, int>>;

/// One QAOA round for MaxCut: H on all, CNOT-Rz-CNOT per edge, Rx on all.
inline Circuit qaoa_maxcut(int n, const EdgeList& edges, double gamma = kDefaultGamma, double beta = kDefaultBeta) {
  Circuit c(n);
  for (int q = 0; q < n; ++q) c.gates.push_back(gates::h(q));
  for (auto [a, b] : edges) {
    c.gates.push_back(gates::cnot(a, b));
    c.gates.push_back(gates::rz(gamma, b));
    c.gates.push_back(gates::cnot(a, b));
  }
  for (int q = 0; q < n; ++q) c.gates.push_back(gates::rx(beta, q));
  return c;
}

inline EdgeList line_edges(int n) {
  EdgeList e;
  for (int q = 0; q + 1 < n; ++q) e.emplace_back(q, q + 1);
  return e;
}

/// Random 4-regular graph by pairing stubs; retries until simple.
inline EdgeList regular4_edges(int n, std::uint64_t seed) {
  if (n < 5) throw Error("maxcut-reg4 needs at least 5 vertices");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    for (int v = 0; v < n; ++v) stubs.insert(stubs.end(), 4, v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<int, int>> es;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      const int a = std::min(stubs[i], stubs[i + 1]), b = std::max(stubs[i], stubs[i + 1]);
      ok = a != b && es.insert({a, b}).second;
    }
    if (ok) return EdgeList(es.begin(), es.end());
  }
  throw Error("maxcut-reg4: no simple graph found");
}

/// Triangles chained through one edge between consecutive clusters.
inline EdgeList cluster_edges(int n) {
  EdgeList e;
  for (int base = 0; base < n; base += 3) {
    const int end = std::min(n, base + 3);
    for (int a = base; a < end; ++a) {
      for (int b = a + 1; b < end; ++b) e.emplace_back(a, b);
    }
    if (end < n) e.emplace_back(end - 1, end);
  }
  return e;
}

/// Transverse-field Ising chain, `steps` Trotter steps.
inline Circuit ising_chain(int n, int steps = 2, double j = 0.8, double h = 0.6) {
  Circuit c(n);
  for (int s = 0; s < steps; ++s) {
    for (int q = 0; q + 1 < n; ++q) {
      c.gates.push_back(gates::cnot(q, q + 1));
      c.gates.push_back(gates::rz(2 * j, q + 1));
      c.gates.push_back(gates::cnot(q, q + 1));
    }
    for (int q = 0; q < n; ++q) c.gates.push_back(gates::rx(2 * h, q));
  }
  return c;
}

/// Excitation-style terms: basis change, CNOT ladder, Rz, ladder back.
inline Circuit uccsd_chain(int n, std::uint64_t seed = 1) {
  if (n < 2) throw Error("uccsd-chain needs at least 2 qubits");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.1, 3.0);
  Circuit c(n);
  for (int term = 0; term < 2; ++term) {
    const bool ry = term % 2 == 1;
    for (int q : {0, n - 1}) c.gates.push_back(ry ? gates::rx(kPi / 2, q) : gates::h(q));
    for (int q = 0; q + 1 < n; ++q) c.gates.push_back(gates::cnot(q, q + 1));
    c.gates.push_back(gates::rz(angle(rng), n - 1));
    for (int q = n - 2; q >= 0; --q) c.gates.push_back(gates::cnot(q, q + 1));
    for (int q : {0, n - 1}) c.gates.push_back(ry ? gates::rx(-kPi / 2, q) : gates::h(q));
  }
  return c;
}

inline const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"maxcut-line", "maxcut-reg4", "maxcut-cluster",
                                                 "ising-chain", "uccsd-chain", "qaoa-triangle"};
  return names;
}

inline Circuit generate_benchmark(const std::string& name, int n, std::uint64_t seed = 1) {
  if (n < 1) throw Error("benchmark size must be positive");
  if (name == "maxcut-line") return qaoa_maxcut(n, line_edges(n));
  if (name == "maxcut-reg4") return qaoa_maxcut(n, regular4_edges(n, seed));
  if (name == "maxcut-cluster") return qaoa_maxcut(n, cluster_edges(n));
  if (name == "ising-chain") return ising_chain(n);
  if (name == "uccsd-chain") return uccsd_chain(n, seed);
  if (name == "qaoa-triangle") return qaoa_maxcut(3, {{0, 1}, {1, 2}, {0, 2}});
  throw Error("unknown benchmark '" + name + "'");
}

struct BenchRow {
  Strategy strategy = Strategy::Isa;
  double makespan_ns = 0.0;
  double normalized = 1.0;  ///< makespan / isa makespan
  std::string selected;
  bool verified = true;
};

/// Compiles `c` under every strategy with one shared latency context.
inline std::vector<BenchRow> bench(const Circuit& c, CompileOptions opt) {
  LatencyContext ctx(opt);
  opt.compare_baseline = false;
  std::vector<BenchRow> rows;
  for (Strategy s : {Strategy::Isa, Strategy::Cls, Strategy::Agg, Strategy::ClsAgg}) {
    opt.strategy = s;
    const CompileResult r = compile(c, opt, ctx);
    rows.push_back({s, r.makespan_ns, 1.0, r.selected, !r.verification || r.verification->pass});
  }
  for (auto& row : rows) row.normalized = row.makespan_ns / rows.front().makespan_ns;
  return rows;
}

inline nlohmann::json bench_json(const std::vector<BenchRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"strategy", to_string(r.strategy)}, {"makespan_ns", r.makespan_ns},
                 {"normalized", r.normalized}, {"selected", r.selected}, {"verified", r.verified}});
  }
  return j;
}

inline std::string bench_text(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "strategy" << std::setw(14) << "makespan_ns" << std::setw(12)
     << "normalized" << "verified\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(10) << to_string(r.strategy) << std::setw(14) << r.makespan_ns << std::setw(12)
       << r.normalized << (r.verified ? "yes" : "NO") << "\n";
  }
  return os.str();
}

}  // namespace qagg
