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
 * @file gdg.hpp
 * @brief Gate dependence graph.
 *
 * Each qubit owns a path: the ordered chain of nodes that touch it. The DAG
 * edges are exactly the consecutive pairs on every path, plus a virtual root
 * (id 0, zero duration) in front of every path's first node. Parent/child
 * maps are derived from the paths, so they cannot fall out of sync.
 *
 * A node's payload is a gate list split into parts. A part is one pulse
 * instruction: a single gate, or a run of gates that the optimal-control
 * engine synthesizes as a whole. A node with several parts is a scheduling
 * unit executed part by part.
 */

#pragma once

#include "qagg/circuit.hpp"
#include "qagg/commute.hpp"

#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <vector>

namespace qagg {

using NodeId = int;
inline constexpr NodeId kRoot = 0;
inline constexpr NodeId kSink = -1;

struct Part {
  std::vector<Gate> gates;
};

struct GdgNode {
  NodeId id = kRoot;
  std::vector<Gate> gates;
  std::vector<Qubit> qubits;  ///< sorted support
  std::vector<Part> parts;
  std::optional<double> duration_ns;

  int width() const { return static_cast<int>(qubits.size()); }
  bool is_root() const { return id == kRoot; }
  /// True when the whole payload is one pulse instruction.
  bool fused() const { return parts.size() == 1; }
  bool acts_on(Qubit q) const { return std::binary_search(qubits.begin(), qubits.end(), q); }
  Matrix unitary() const { return sequence_unitary(gates, qubits); }
};

class ContractionError : public Error {
 public:
  using Error::Error;
};

class Gdg {
 public:
  Gdg() = default;
  explicit Gdg(int num_qubits) : num_qubits_(num_qubits), paths_(num_qubits) {
    GdgNode root;
    root.id = kRoot;
    root.duration_ns = 0.0;
    for (int q = 0; q < num_qubits; ++q) root.qubits.push_back(q);
    nodes_.emplace(kRoot, std::move(root));
  }

  int num_qubits() const { return num_qubits_; }
  /// Number of non-root nodes.
  std::size_t size() const { return nodes_.size() - 1; }
  bool empty() const { return size() == 0; }

  bool contains(NodeId id) const { return id != kRoot && nodes_.count(id) > 0; }
  const GdgNode& node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error("gdg: unknown node " + std::to_string(id));
    return it->second;
  }
  GdgNode& node(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error("gdg: unknown node " + std::to_string(id));
    return it->second;
  }

  /// Non-root node ids in increasing order.
  std::vector<NodeId> node_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(size());
    for (const auto& [id, n] : nodes_) {
      if (id != kRoot) ids.push_back(id);
    }
    return ids;
  }

  const std::vector<NodeId>& path(Qubit q) const { return paths_.at(q); }
  NodeId next_id() const { return next_id_; }

  /// Appends a node at the end of every operand qubit's path.
  NodeId append(std::vector<Part> parts) {
    GdgNode n;
    n.id = next_id_++;
    n.parts = std::move(parts);
    for (const Part& p : n.parts) n.gates.insert(n.gates.end(), p.gates.begin(), p.gates.end());
    if (n.gates.empty()) throw Error("gdg: empty node payload");
    n.qubits = support(n.gates);
    for (Qubit q : n.qubits) {
      if (q < 0 || q >= num_qubits_) throw Error("gdg: operand out of range");
      paths_[q].push_back(n.id);
    }
    const NodeId id = n.id;
    nodes_.emplace(id, std::move(n));
    return id;
  }
  NodeId append(const Gate& g) { return append(std::vector<Part>{Part{{g}}}); }

  NodeId parent(NodeId id, Qubit q) const {
    const auto& p = paths_.at(q);
    const auto idx = index_on(id, q);
    return idx == 0 ? kRoot : p[idx - 1];
  }
  NodeId child(NodeId id, Qubit q) const {
    const auto& p = paths_.at(q);
    if (id == kRoot) return p.empty() ? kSink : p.front();
    const auto idx = index_on(id, q);
    return idx + 1 == p.size() ? kSink : p[idx + 1];
  }
  std::map<Qubit, NodeId> parents(NodeId id) const {
    std::map<Qubit, NodeId> out;
    for (Qubit q : node(id).qubits) out[q] = parent(id, q);
    return out;
  }
  std::map<Qubit, NodeId> children(NodeId id) const {
    std::map<Qubit, NodeId> out;
    for (Qubit q : node(id).qubits) out[q] = child(id, q);
    return out;
  }

  /// Position of `id` on qubit q's path. Throws if the node is not on it.
  std::size_t index_on(NodeId id, Qubit q) const {
    const auto& p = paths_.at(q);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == id) return i;
    }
    throw Error("gdg: node " + std::to_string(id) + " is not on qubit " + std::to_string(q));
  }

  /// Direct predecessors (distinct, sorted), excluding the root.
  std::vector<NodeId> predecessors(NodeId id) const {
    std::vector<NodeId> out;
    for (Qubit q : node(id).qubits) {
      const NodeId p = parent(id, q);
      if (p != kRoot) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::vector<NodeId> successors(NodeId id) const {
    std::vector<NodeId> out;
    for (Qubit q : node(id).qubits) {
      const NodeId c = child(id, q);
      if (c != kSink) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Kahn's algorithm, smallest ready id first. Empty optional on a cycle.
  std::optional<std::vector<NodeId>> try_topological_order() const {
    std::unordered_map<NodeId, std::vector<NodeId>> succ;
    std::unordered_map<NodeId, int> indeg;
    for (const auto& [id, n] : nodes_) {
      if (id != kRoot) indeg[id] = 0;
    }
    for (const auto& path : paths_) {
      for (std::size_t i = 1; i < path.size(); ++i) {
        succ[path[i - 1]].push_back(path[i]);
        ++indeg[path[i]];
      }
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [id, d] : indeg) {
      if (d == 0) ready.push(id);
    }
    std::vector<NodeId> order;
    order.reserve(indeg.size());
    while (!ready.empty()) {
      const NodeId n = ready.top();
      ready.pop();
      order.push_back(n);
      for (NodeId s : succ[n]) {
        if (--indeg[s] == 0) ready.push(s);
      }
    }
    if (order.size() != indeg.size()) return std::nullopt;
    return order;
  }
  std::vector<NodeId> topological_order() const {
    auto order = try_topological_order();
    if (!order) throw Error("gdg: dependence cycle");
    return *order;
  }
  bool is_acyclic() const { return try_topological_order().has_value(); }

  /// True iff `to` is reachable from `from` through at least one edge.
  bool reaches(NodeId from, NodeId to) const {
    std::vector<NodeId> stack = successors(from);
    std::set<NodeId> seen;
    while (!stack.empty()) {
      const NodeId n = stack.back();
      stack.pop_back();
      if (n == to) return true;
      if (!seen.insert(n).second) continue;
      for (NodeId s : successors(n)) stack.push_back(s);
    }
    return false;
  }

  /// Replaces qubit q's path with a permutation of the same node set.
  void set_path(Qubit q, std::vector<NodeId> order) {
    std::vector<NodeId> a = paths_.at(q), b = order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw Error("gdg: set_path must permute the existing path");
    paths_[q] = std::move(order);
  }

  /**
   * Replaces `ids` by one node whose payload concatenates the members in
   * topological order. Members must be contiguous on every qubit path they
   * touch, the union support must not exceed `max_width`, and the result must
   * stay acyclic. Throws ContractionError otherwise (graph left unchanged).
   */
  NodeId contract(const std::vector<NodeId>& ids, int max_width = kMaxDenseQubits) {
    if (ids.empty()) throw ContractionError("contract: empty node set");
    std::set<NodeId> members(ids.begin(), ids.end());
    std::set<Qubit> qs;
    for (NodeId id : members) {
      if (!contains(id)) throw ContractionError("contract: unknown node " + std::to_string(id));
      for (Qubit q : node(id).qubits) qs.insert(q);
    }
    if (members.size() == 1) return *members.begin();
    if (static_cast<int>(qs.size()) > max_width) {
      throw ContractionError("contract: width " + std::to_string(qs.size()) + " exceeds " +
                             std::to_string(max_width));
    }
    for (Qubit q : qs) {
      const auto& p = paths_[q];
      std::size_t first = p.size(), last = 0, count = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (members.count(p[i])) {
          first = std::min(first, i);
          last = i;
          ++count;
        }
      }
      if (last - first + 1 != count) {
        throw ContractionError("contract: members are not contiguous on qubit " + std::to_string(q));
      }
    }
    // Members must form one connected piece through shared qubits; otherwise
    // the "aggregate" would just be parallel gates glued together.
    {
      std::set<NodeId> reached{*members.begin()};
      std::vector<NodeId> stack{*members.begin()};
      while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        for (Qubit q : node(n).qubits) {
          for (NodeId m : members) {
            if (!reached.count(m) && node(m).acts_on(q)) {
              reached.insert(m);
              stack.push_back(m);
            }
          }
        }
      }
      if (reached.size() != members.size()) {
        throw ContractionError("contract: members do not share a qubit path");
      }
    }

    const auto saved_paths = paths_;
    const auto order = topological_order();
    GdgNode merged;
    merged.id = next_id_;
    for (NodeId id : order) {
      if (!members.count(id)) continue;
      const GdgNode& m = node(id);
      merged.gates.insert(merged.gates.end(), m.gates.begin(), m.gates.end());
      merged.parts.insert(merged.parts.end(), m.parts.begin(), m.parts.end());
    }
    merged.qubits.assign(qs.begin(), qs.end());
    for (Qubit q : qs) {
      auto& p = paths_[q];
      std::vector<NodeId> np;
      bool placed = false;
      for (NodeId id : p) {
        if (members.count(id)) {
          if (!placed) np.push_back(merged.id);
          placed = true;
        } else {
          np.push_back(id);
        }
      }
      p = std::move(np);
    }
    std::map<NodeId, GdgNode> removed;
    for (NodeId id : members) {
      removed.emplace(id, std::move(nodes_.at(id)));
      nodes_.erase(id);
    }
    nodes_.emplace(merged.id, std::move(merged));
    if (!is_acyclic()) {
      nodes_.erase(next_id_);
      for (auto& [id, n] : removed) nodes_.emplace(id, std::move(n));
      paths_ = saved_paths;
      throw ContractionError("contract: contraction would create a dependence cycle");
    }
    return next_id_++;
  }

  /// Structural audit: every non-root node sits exactly once on each of its
  /// qubits' paths and nowhere else, parent/child maps agree, graph acyclic.
  void audit() const {
    std::map<NodeId, std::set<Qubit>> seen;
    for (int q = 0; q < num_qubits_; ++q) {
      std::set<NodeId> on_path;
      for (NodeId id : paths_[q]) {
        if (!contains(id)) throw Error("audit: path references unknown node");
        if (!on_path.insert(id).second) throw Error("audit: node repeated on a path");
        if (!node(id).acts_on(q)) throw Error("audit: node on a path it does not touch");
        seen[id].insert(q);
      }
    }
    for (const auto& [id, n] : nodes_) {
      if (id == kRoot) continue;
      if (seen[id] != std::set<Qubit>(n.qubits.begin(), n.qubits.end())) {
        throw Error("audit: node " + std::to_string(id) + " missing from a path");
      }
      if (support(n.gates) != n.qubits) throw Error("audit: stale node support");
      std::size_t part_gates = 0;
      for (const Part& p : n.parts) part_gates += p.gates.size();
      if (part_gates != n.gates.size()) throw Error("audit: parts disagree with payload");
      for (Qubit q : n.qubits) {
        const NodeId p = parent(id, q);
        if (p != kRoot && child(p, q) != id) throw Error("audit: parent/child mismatch");
        const NodeId c = child(id, q);
        if (c != kSink && parent(c, q) != id) throw Error("audit: child/parent mismatch");
      }
    }
    if (!is_acyclic()) throw Error("audit: cycle");
  }

  /// Payloads concatenated in topological order.
  Circuit flatten() const {
    Circuit c(num_qubits_);
    for (NodeId id : topological_order()) {
      for (const Gate& g : node(id).gates) c.gates.push_back(g);
    }
    return c;
  }

 private:
  int num_qubits_ = 0;
  std::map<NodeId, GdgNode> nodes_;
  std::vector<std::vector<NodeId>> paths_;
  NodeId next_id_ = 1;
};

/// One node per gate, chained per qubit in program order.
inline Gdg build_gdg(const Circuit& c) {
  Gdg g(c.num_qubits);
  for (const Gate& gate : c.gates) g.append(gate);
  return g;
}

using DurationFn = std::function<double(const GdgNode&)>;

/// Duration from the node's cached field; throws if it is unset.
inline double cached_duration(const GdgNode& n) {
  if (n.is_root()) return 0.0;
  if (!n.duration_ns) throw Error("node " + std::to_string(n.id) + " has no duration");
  return *n.duration_ns;
}

struct CriticalPath {
  double total_ns = 0.0;
  std::vector<NodeId> path;  ///< witness, root excluded
};

/// Longest duration-weighted root-to-sink path. Ties resolve towards the
/// lowest node ids.
inline CriticalPath critical_path(const Gdg& g, const DurationFn& duration = cached_duration) {
  constexpr double kTie = 1e-9;
  const auto order = g.topological_order();
  std::unordered_map<NodeId, double> finish;
  std::unordered_map<NodeId, NodeId> via;
  CriticalPath out;
  NodeId best_end = kRoot;
  for (NodeId id : order) {
    double start = 0.0;
    NodeId from = kRoot;
    for (NodeId p : g.predecessors(id)) {  // ascending ids
      const double f = finish.at(p);
      if (f > start + kTie || (from == kRoot && f >= start - kTie)) {
        start = std::max(start, f);
        from = p;
      }
    }
    const double end = start + duration(g.node(id));
    finish[id] = end;
    via[id] = from;
    if (best_end == kRoot || end > out.total_ns + kTie ||
        (std::abs(end - out.total_ns) <= kTie && id < best_end)) {
      out.total_ns = std::max(out.total_ns, end);
      best_end = id;
    }
  }
  for (NodeId n = best_end; n != kRoot; n = via.at(n)) out.path.push_back(n);
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

/// Per-qubit ordered commutation groups.
struct CommutationGroups {
  std::vector<std::vector<std::vector<NodeId>>> per_qubit;

  /// Index of the group holding `id` on qubit q.
  int group_of(Qubit q, NodeId id) const {
    const auto& gs = per_qubit.at(q);
    for (std::size_t i = 0; i < gs.size(); ++i) {
      if (std::find(gs[i].begin(), gs[i].end(), id) != gs[i].end()) return static_cast<int>(i);
    }
    throw Error("commutation groups: node " + std::to_string(id) + " not on qubit " +
                std::to_string(q));
  }
};

/// Memo of node-pair commutation verdicts, keyed by node ids. Only valid for
/// a single graph lineage (ids are never reused within one Gdg).
class CommuteCache {
 public:
  bool get(const Gdg& g, NodeId a, NodeId b, int max_width) {
    if (a > b) std::swap(a, b);
    const auto key = std::make_pair(a, b);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const GdgNode& na = g.node(a);
    const GdgNode& nb = g.node(b);
    bool c = false;
    try {
      Operator oa(na.gates), ob(nb.gates);
      c = commutes(oa, ob, max_width).commutes;
    } catch (const WidthError&) {
      c = false;  // too wide to check: keep the dependence
    }
    memo_.emplace(key, c);
    return c;
  }

 private:
  std::map<std::pair<NodeId, NodeId>, bool> memo_;
};

/// Greedy left-to-right grouping per qubit: a node joins the current group
/// iff it commutes with every member, otherwise it opens a new group.
inline CommutationGroups build_commutation_groups(const Gdg& g, CommuteCache* cache = nullptr,
                                                  int max_width = kMaxDenseQubits) {
  CommuteCache local;
  CommuteCache& memo = cache ? *cache : local;
  CommutationGroups out;
  out.per_qubit.resize(g.num_qubits());
  for (int q = 0; q < g.num_qubits(); ++q) {
    auto& groups = out.per_qubit[q];
    for (NodeId id : g.path(q)) {
      bool joins = !groups.empty();
      if (joins) {
        for (NodeId m : groups.back()) {
          if (!memo.get(g, id, m, max_width)) {
            joins = false;
            break;
          }
        }
      }
      if (joins) {
        groups.back().push_back(id);
      } else {
        groups.push_back({id});
      }
    }
  }
  return out;
}

/// Every node in its own group: plain dependence order.
inline CommutationGroups singleton_groups(const Gdg& g) {
  CommutationGroups out;
  out.per_qubit.resize(g.num_qubits());
  for (int q = 0; q < g.num_qubits(); ++q) {
    for (NodeId id : g.path(q)) out.per_qubit[q].push_back({id});
  }
  return out;
}

}  // namespace qagg
