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
 * @file scheduler.hpp
 * @brief Commutativity-aware logical scheduling.
 *
 * The loop walks time points. At each point a node is a candidate when it
 * belongs to the current commutation group of every operand qubit and all of
 * those qubits are idle. Candidates that share qubits are thinned by maximum
 * matching over the qubit graph. Nodes wider than two qubits cannot be graph
 * edges, so they are placed first, greedily by id.
 */

#pragma once

#include "qagg/gdg.hpp"
#include "qagg/latency.hpp"
#include "qagg/matching.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace qagg {

struct ScheduleEntry {
  NodeId node = kRoot;
  std::vector<Qubit> qubits;
  double start_ns = 0.0;
  double duration_ns = 0.0;

  double end_ns() const { return start_ns + duration_ns; }
};

struct Schedule {
  std::vector<ScheduleEntry> entries;  ///< placement order; starts nondecreasing
  double makespan_ns = 0.0;

  /// Node ids in execution order.
  std::vector<NodeId> order() const {
    std::vector<NodeId> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.node);
    return out;
  }
  const ScheduleEntry& entry(NodeId id) const {
    for (const auto& e : entries) {
      if (e.node == id) return e;
    }
    throw Error("schedule: node " + std::to_string(id) + " not scheduled");
  }
};

class DeadlockError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline constexpr double kTimeEps = 1e-9;

inline void finalize(Schedule& s) {
  s.makespan_ns = 0.0;
  for (const auto& e : s.entries) s.makespan_ns = std::max(s.makespan_ns, e.end_ns());
}

inline Schedule group_schedule(const Gdg& g, const CommutationGroups& groups,
                               const DurationFn& duration) {
  const int nq = g.num_qubits();
  if (static_cast<int>(groups.per_qubit.size()) != nq) {
    throw Error("schedule: group table does not match the graph");
  }
  // Remaining members per (qubit, group).
  std::vector<std::vector<std::vector<NodeId>>> pending = groups.per_qubit;
  std::vector<std::size_t> current(nq, 0);
  std::vector<double> free_at(nq, 0.0);
  std::map<NodeId, double> dur;
  for (NodeId id : g.node_ids()) dur[id] = duration(g.node(id));

  auto advance = [&](Qubit q) {
    while (current[q] < pending[q].size() && pending[q][current[q]].empty()) ++current[q];
  };
  auto in_current = [&](Qubit q, NodeId id) {
    if (current[q] >= pending[q].size()) return false;
    const auto& grp = pending[q][current[q]];
    return std::find(grp.begin(), grp.end(), id) != grp.end();
  };
  for (Qubit q = 0; q < nq; ++q) advance(q);

  Schedule s;
  std::size_t remaining = g.size();
  double now = 0.0;
  while (remaining > 0) {
    // Candidates at `now`, ascending id.
    std::set<NodeId> seen;
    std::vector<NodeId> cands;
    for (Qubit q = 0; q < nq; ++q) {
      if (current[q] >= pending[q].size() || free_at[q] > now + kTimeEps) continue;
      for (NodeId id : pending[q][current[q]]) {
        if (!seen.insert(id).second) continue;
        const GdgNode& n = g.node(id);
        const bool ok = std::all_of(n.qubits.begin(), n.qubits.end(), [&](Qubit r) {
          return free_at[r] <= now + kTimeEps && in_current(r, id);
        });
        if (ok) cands.push_back(id);
      }
    }
    std::sort(cands.begin(), cands.end());

    std::vector<bool> busy(nq, false);
    std::vector<NodeId> chosen;
    ComputationalGraph gc;
    for (NodeId id : cands) {
      const GdgNode& n = g.node(id);
      if (n.width() <= 2) continue;
      if (std::none_of(n.qubits.begin(), n.qubits.end(), [&](Qubit q) { return busy[q]; })) {
        for (Qubit q : n.qubits) busy[q] = true;
        chosen.push_back(id);
      }
    }
    for (NodeId id : cands) {
      const GdgNode& n = g.node(id);
      if (n.width() > 2) continue;
      if (std::any_of(n.qubits.begin(), n.qubits.end(), [&](Qubit q) { return busy[q]; })) continue;
      if (n.width() == 2) {
        gc.edges.push_back({id, n.qubits[0], n.qubits[1]});
      } else {
        gc.self_loops.push_back({id, n.qubits[0]});
      }
    }
    for (NodeId id : max_matching(gc)) chosen.push_back(id);
    std::sort(chosen.begin(), chosen.end());

    for (NodeId id : chosen) {
      const GdgNode& n = g.node(id);
      const double d = dur.at(id);
      s.entries.push_back({id, n.qubits, now, d});
      for (Qubit q : n.qubits) {
        free_at[q] = now + d;
        auto& grp = pending[q][current[q]];
        grp.erase(std::find(grp.begin(), grp.end(), id));
        advance(q);
      }
      --remaining;
    }
    if (remaining == 0) break;

    // Stay at `now` while something was placed (a zero-length instruction
    // may free qubits at once); otherwise jump to the earliest finish.
    if (!chosen.empty()) continue;
    double next = std::numeric_limits<double>::infinity();
    for (Qubit q = 0; q < nq; ++q) {
      if (free_at[q] > now + kTimeEps) next = std::min(next, free_at[q]);
    }
    if (!std::isfinite(next)) {
      std::ostringstream os;
      os << "schedule: deadlock at t=" << now << " ns; frontier:";
      for (Qubit q = 0; q < nq; ++q) {
        if (current[q] >= pending[q].size()) continue;
        os << " q" << q << "{";
        for (NodeId id : pending[q][current[q]]) os << ' ' << id;
        os << " }";
      }
      throw DeadlockError(os.str());
    }
    now = next;
  }
  finalize(s);
  return s;
}

}  // namespace detail

/// ASAP over the dependence DAG: every node is its own commutation group.
inline Schedule list_schedule(const Gdg& g, const DurationFn& duration) {
  return detail::group_schedule(g, singleton_groups(g), duration);
}
inline Schedule list_schedule(const Gdg& g, const LatencyModel& lat) {
  return list_schedule(g, lat.as_duration_fn());
}

/// Commutativity-aware schedule. Greedy matching can occasionally lose to
/// plain ASAP; the shorter of the two is returned, so commutation never
/// lengthens the result.
inline Schedule cls_schedule(const Gdg& g, const CommutationGroups& groups,
                             const DurationFn& duration) {
  Schedule cls = detail::group_schedule(g, groups, duration);
  Schedule asap = list_schedule(g, duration);
  return asap.makespan_ns + detail::kTimeEps < cls.makespan_ns ? asap : cls;
}
inline Schedule cls_schedule(const Gdg& g, const CommutationGroups& groups,
                             const LatencyModel& lat) {
  return cls_schedule(g, groups, lat.as_duration_fn());
}

/// Violations of qubit exclusivity or of the group order, one per line.
/// Empty when the schedule is valid.
inline std::vector<std::string> validate_schedule(const Gdg& g, const CommutationGroups& groups,
                                                  const Schedule& s) {
  std::vector<std::string> out;
  std::map<NodeId, const ScheduleEntry*> at;
  for (const auto& e : s.entries) {
    if (!at.emplace(e.node, &e).second) out.push_back("node " + std::to_string(e.node) + " scheduled twice");
  }
  for (NodeId id : g.node_ids()) {
    if (!at.count(id)) out.push_back("node " + std::to_string(id) + " not scheduled");
  }
  if (!out.empty()) return out;
  for (Qubit q = 0; q < g.num_qubits(); ++q) {
    std::vector<const ScheduleEntry*> on;
    for (const auto& e : s.entries) {
      if (std::find(e.qubits.begin(), e.qubits.end(), q) != e.qubits.end()) on.push_back(&e);
    }
    std::stable_sort(on.begin(), on.end(), [](auto* a, auto* b) { return a->start_ns < b->start_ns; });
    for (std::size_t i = 1; i < on.size(); ++i) {
      if (on[i]->start_ns < on[i - 1]->end_ns() - detail::kTimeEps) {
        out.push_back("overlap on q" + std::to_string(q) + ": nodes " + std::to_string(on[i - 1]->node) +
                      " and " + std::to_string(on[i]->node));
      }
    }
    const auto& gs = groups.per_qubit.at(q);
    for (std::size_t k = 1; k < gs.size(); ++k) {
      for (NodeId later : gs[k]) {
        for (NodeId earlier : gs[k - 1]) {
          if (at[later]->start_ns < at[earlier]->end_ns() - detail::kTimeEps) {
            out.push_back("q" + std::to_string(q) + ": node " + std::to_string(later) +
                          " starts before group predecessor " + std::to_string(earlier) + " ends");
          }
        }
      }
    }
  }
  return out;
}

/// The scheduled gates as a circuit, in execution order.
inline Circuit scheduled_circuit(const Gdg& g, const Schedule& s) {
  Circuit c(g.num_qubits());
  for (const auto& e : s.entries) {
    for (const Gate& gate : g.node(e.node).gates) c.gates.push_back(gate);
  }
  return c;
}

/// One row per qubit; each column covers `ns_per_col` ns and shows the last
/// digit of the node id occupying it.
inline std::string render_timeline(const Schedule& s, int num_qubits, double ns_per_col = 10.0) {
  const int cols = static_cast<int>(std::ceil(s.makespan_ns / ns_per_col));
  std::vector<std::string> rows(num_qubits, std::string(cols, '.'));
  for (const auto& e : s.entries) {
    const int c0 = static_cast<int>(std::floor(e.start_ns / ns_per_col + 1e-9));
    const int c1 = std::max(c0 + 1, static_cast<int>(std::ceil(e.end_ns() / ns_per_col - 1e-9)));
    for (Qubit q : e.qubits) {
      for (int c = c0; c < c1 && c < cols; ++c) rows[q][c] = static_cast<char>('0' + e.node % 10);
    }
  }
  std::ostringstream os;
  for (int q = 0; q < num_qubits; ++q) os << 'q' << q << (q < 10 ? "  |" : " |") << rows[q] << "|\n";
  return os.str();
}

}  // namespace qagg
