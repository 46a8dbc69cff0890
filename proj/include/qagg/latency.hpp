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

#pragma once

#include "qagg/gdg.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <string>

namespace qagg {

enum class LatencyMode { Table, Oracle };

/// Duration (ns) of one pulse instruction given its gates and sorted support.
using InstructionOracle =
    std::function<double(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits)>;

/// Duration of one pulse for a node's parts run as a single instruction, or
/// empty when none is found that beats the parts back to back.
using FusedOracle = std::function<std::optional<double>(const std::vector<Part>& parts)>;

/// Gate-duration accounting. A node runs its parts back to back, so its
/// duration is the sum over parts. TABLE mode prices single-gate parts by
/// gate name (any angle); ORACLE mode asks the optimal-control oracle.
class LatencyModel {
 public:
  /// Default per-gate times in ns.
  static std::map<std::string, double> default_table() {
    return {{"cnot", 47.1}, {"swap", 50.1}, {"h", 13.7}, {"rz", 9.8}, {"rx", 6.1}};
  }

  static LatencyModel table(std::map<std::string, double> t = default_table()) {
    LatencyModel m;
    m.mode_ = LatencyMode::Table;
    m.table_ = std::move(t);
    return m;
  }

  static LatencyModel oracle(InstructionOracle fn) {
    if (!fn) throw Error("latency: oracle mode needs an oracle");
    LatencyModel m;
    m.mode_ = LatencyMode::Oracle;
    m.oracle_ = std::move(fn);
    return m;
  }

  /// Replaces the default fused pricing (the oracle on all gates at once).
  LatencyModel& with_fused(FusedOracle fn) {
    fused_ = std::move(fn);
    return *this;
  }

  LatencyMode mode() const { return mode_; }
  const std::map<std::string, double>& entries() const { return table_; }

  /// Overrides or extends table entries from a JSON object {"name": ns, ...}.
  void merge_table(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("latency table must be a JSON object");
    for (const auto& [name, v] : j.items()) {
      if (!v.is_number() || v.get<double>() <= 0.0) {
        throw Error("latency table entry '" + name + "' must be a positive number");
      }
      table_[name] = v.get<double>();
    }
  }
  void merge_table_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open latency table " + path);
    merge_table(nlohmann::json::parse(f, nullptr, true, /*ignore_comments=*/true));
  }

  double gate(const Gate& g) const {
    const std::string name(gate_name(g.kind));
    auto it = table_.find(name);
    if (it == table_.end()) throw Error("latency table has no entry for gate '" + name + "'");
    return it->second;
  }

  double part(const Part& p) const {
    if (mode_ == LatencyMode::Oracle) return oracle_(p.gates, support(p.gates));
    if (p.gates.size() != 1) {
      throw Error("latency: a fused " + std::to_string(p.gates.size()) +
                  "-gate instruction has no table entry; use oracle mode");
    }
    return gate(p.gates.front());
  }

  /// Single-instruction duration for all of a node's gates.
  std::optional<double> fused(const GdgNode& n) const {
    if (fused_) return fused_(n.parts);
    return part(Part{n.gates});
  }

  double duration(const GdgNode& n) const {
    if (n.is_root()) return 0.0;
    double total = 0.0;
    for (const Part& p : n.parts) total += part(p);
    return total;
  }

  DurationFn as_duration_fn() const {
    return [this](const GdgNode& n) { return duration(n); };
  }

 private:
  LatencyMode mode_ = LatencyMode::Table;
  std::map<std::string, double> table_;
  InstructionOracle oracle_;
  FusedOracle fused_;
};

/// Writes model durations onto every node's duration field.
inline void assign_durations(Gdg& g, const LatencyModel& lat) {
  for (NodeId id : g.node_ids()) g.node(id).duration_ns = lat.duration(g.node(id));
}

}  // namespace qagg
