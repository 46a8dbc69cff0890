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
 * @file aggregator.hpp
 * @brief Instruction aggregation over a routed GDG.
 *
 * Two nodes may merge when they share a qubit, fit in the width limit, and
 * on every shared qubit are either neighbours on the path, members of the
 * same commutation group, or members of consecutive groups. In the last two
 * cases the path is first reordered inside the groups so the pair becomes
 * adjacent. A merge is monotonic when, with the merged duration set to the
 * sum of its members, the critical path does not grow.
 */

#pragma once

#include "qagg/gdg.hpp"
#include "qagg/latency.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <set>
#include <thread>
#include <vector>

namespace qagg {

inline constexpr double kMonotonicEps = 1e-9;

/// Estimated duration of a would-be fused instruction, if known cheaply.
using DurationEstimate =
    std::function<std::optional<double>(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits)>;

struct Action {
  NodeId a = kRoot;
  NodeId b = kRoot;
  double critical_path_before_ns = 0.0;
  double critical_path_after_ns = 0.0;  ///< with the merged duration at the sum
  double predicted_gain_ns = 0.0;       ///< with the estimate when available
  double member_sum_ns = 0.0;

  bool monotonic() const { return critical_path_after_ns <= critical_path_before_ns + kMonotonicEps; }
};

namespace detail {

inline void move_on_path(std::vector<NodeId>& p, std::size_t from, std::size_t to) {
  const NodeId id = p[from];
  p.erase(p.begin() + static_cast<std::ptrdiff_t>(from));
  p.insert(p.begin() + static_cast<std::ptrdiff_t>(to), id);
}

inline std::size_t group_start(const CommutationGroups& groups, Qubit q, int k) {
  std::size_t s = 0;
  for (int i = 0; i < k; ++i) s += groups.per_qubit[q][i].size();
  return s;
}

}  // namespace detail

/**
 * The graph after merging a and b, with the merged node's duration set to
 * the sum of the members' durations when both are known. Empty when the
 * pair cannot aggregate. `merged_id` receives the new node's id.
 */
inline std::optional<Gdg> merge_pair(const Gdg& g, const CommutationGroups& groups, NodeId a, NodeId b,
                                     int max_width, NodeId* merged_id = nullptr) {
  if (a == b || a == kRoot || b == kRoot || !g.contains(a) || !g.contains(b)) return std::nullopt;
  const GdgNode& na = g.node(a);
  const GdgNode& nb = g.node(b);
  std::vector<Qubit> shared, all;
  std::set_intersection(na.qubits.begin(), na.qubits.end(), nb.qubits.begin(), nb.qubits.end(),
                        std::back_inserter(shared));
  std::set_union(na.qubits.begin(), na.qubits.end(), nb.qubits.begin(), nb.qubits.end(), std::back_inserter(all));
  if (shared.empty() || static_cast<int>(all.size()) > max_width) return std::nullopt;

  Gdg out = g;
  for (Qubit q : shared) {
    std::vector<NodeId> p = g.path(q);
    std::size_t i = g.index_on(a, q), j = g.index_on(b, q);
    NodeId first = a, second = b;
    if (j < i) {
      std::swap(i, j);
      std::swap(first, second);
    }
    if (j == i + 1) continue;
    const int gi = groups.group_of(q, first), gj = groups.group_of(q, second);
    if (gi == gj) {
      detail::move_on_path(p, j, i + 1);
    } else if (gj == gi + 1) {
      const std::size_t boundary = detail::group_start(groups, q, gj);  // first index of group gj
      detail::move_on_path(p, i, boundary - 1);
      detail::move_on_path(p, j, boundary);
    } else {
      return std::nullopt;
    }
    out.set_path(q, std::move(p));
  }
  if (!out.try_topological_order()) return std::nullopt;  // reorder crossed another path
  NodeId id = kRoot;
  try {
    id = out.contract({a, b}, max_width);
  } catch (const ContractionError&) {
    return std::nullopt;
  }
  if (na.duration_ns && nb.duration_ns) out.node(id).duration_ns = *na.duration_ns + *nb.duration_ns;
  if (merged_id) *merged_id = id;
  return out;
}

inline bool can_aggregate(const Gdg& g, const CommutationGroups& groups, NodeId a, NodeId b, int max_width) {
  return merge_pair(g, groups, a, b, max_width).has_value();
}

/// Aggregable pair with critical-path figures, or empty. Needs durations on
/// every node.
inline std::optional<Action> evaluate_action(const Gdg& g, const CommutationGroups& groups, NodeId a, NodeId b,
                                             int max_width, const DurationEstimate& estimate = nullptr,
                                             std::optional<double> cp_before = std::nullopt) {
  NodeId id = kRoot;
  auto merged = merge_pair(g, groups, a, b, max_width, &id);
  if (!merged) return std::nullopt;
  Action act;
  act.a = std::min(a, b);
  act.b = std::max(a, b);
  act.critical_path_before_ns = cp_before ? *cp_before : critical_path(g).total_ns;
  act.member_sum_ns = cached_duration(g.node(a)) + cached_duration(g.node(b));
  act.critical_path_after_ns = critical_path(*merged).total_ns;
  act.predicted_gain_ns = act.critical_path_before_ns - act.critical_path_after_ns;
  if (estimate) {
    const GdgNode& m = merged->node(id);
    if (auto d = estimate(m.gates, m.qubits); d && *d < act.member_sum_ns) {
      merged->node(id).duration_ns = *d;
      act.predicted_gain_ns = act.critical_path_before_ns - critical_path(*merged).total_ns;
    }
  }
  return act;
}

inline bool is_monotonic(const Gdg& g, const CommutationGroups& groups, NodeId a, NodeId b, int max_width) {
  auto act = evaluate_action(g, groups, a, b, max_width);
  return act && act->monotonic();
}

/// Every aggregable pair (a < b), in ascending (a, b) order.
inline std::vector<Action> enumerate_actions(const Gdg& g, const CommutationGroups& groups, int max_width,
                                             const DurationEstimate& estimate = nullptr) {
  const double cp = critical_path(g).total_ns;
  std::vector<Action> out;
  for (NodeId a : g.node_ids()) {
    std::set<NodeId> near;
    for (Qubit q : g.node(a).qubits) {
      const int ga = groups.group_of(q, a);
      const auto& gs = groups.per_qubit[q];
      for (int k = std::max(0, ga - 1); k <= std::min(static_cast<int>(gs.size()) - 1, ga + 1); ++k) {
        for (NodeId b : gs[k]) {
          if (b > a) near.insert(b);
        }
      }
      const auto& p = g.path(q);
      const std::size_t i = g.index_on(a, q);
      if (i + 1 < p.size() && p[i + 1] > a) near.insert(p[i + 1]);
      if (i > 0 && p[i - 1] > a) near.insert(p[i - 1]);
    }
    for (NodeId b : near) {
      if (auto act = evaluate_action(g, groups, a, b, max_width, estimate, cp)) out.push_back(*act);
    }
  }
  return out;
}

struct AggregateOptions {
  int max_width = 4;            ///< q_L
  bool use_commutation = true;  ///< false: only path neighbours may merge
  int max_outer = 10;
  double tolerance_ns = 0.1;    ///< outer loop stops when no duration moves more
  int threads = 0;              ///< oracle workers; 0 = hardware concurrency
  DurationEstimate estimate;    ///< cached fused durations, for ranking
};

struct AggregateResult {
  Gdg gdg{0};
  nlohmann::json trace = nlohmann::json::array();
  int outer_iterations = 0;
  int actions = 0;
};

namespace detail {

inline CommutationGroups groups_for(const Gdg& g, const AggregateOptions& opt, CommuteCache& cache) {
  return opt.use_commutation ? build_commutation_groups(g, &cache, opt.max_width) : singleton_groups(g);
}

/// Runs fn(i) for i in [0, n) on a bounded pool; rethrows the first failure
/// by index.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/**
 * Greedy monotonic aggregation. The inner loop applies the best monotonic
 * action (largest predicted gain, then largest member sum, then lowest ids)
 * until none is left. Merged nodes are then priced as one pulse by `lat`
 * (ORACLE mode only) and fused when that beats running their parts back to
 * back. The outer loop repeats while some duration moved by more than the
 * tolerance. Every node must carry a duration on entry.
 */
inline AggregateResult aggregate_loop(const Gdg& input, const LatencyModel& lat, const AggregateOptions& opt = {}) {
  AggregateResult res;
  res.gdg = input;
  Gdg& g = res.gdg;
  for (NodeId id : g.node_ids()) cached_duration(g.node(id));  // every node priced
  CommuteCache cache;
  std::set<NodeId> priced;  // multi-part nodes already offered to the oracle
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    ++res.outer_iterations;
    for (;;) {
      const CommutationGroups groups = detail::groups_for(g, opt, cache);
      std::optional<Action> best;
      for (const Action& act : enumerate_actions(g, groups, opt.max_width, opt.estimate)) {
        if (!act.monotonic()) continue;
        if (!best || act.predicted_gain_ns > best->predicted_gain_ns + kMonotonicEps ||
            (std::abs(act.predicted_gain_ns - best->predicted_gain_ns) <= kMonotonicEps &&
             act.member_sum_ns > best->member_sum_ns + kMonotonicEps)) {
          best = act;
        }
      }
      if (!best) break;
      NodeId id = kRoot;
      auto next = merge_pair(g, groups, best->a, best->b, opt.max_width, &id);
      if (!next) throw Error("aggregate: selected action no longer applies");
      g = std::move(*next);
      ++res.actions;
      res.trace.push_back({{"outer", outer},
                           {"merge", {best->a, best->b}},
                           {"node", id},
                           {"qubits", g.node(id).qubits},
                           {"critical_path_before_ns", best->critical_path_before_ns},
                           {"critical_path_after_ns", best->critical_path_after_ns},
                           {"predicted_gain_ns", best->predicted_gain_ns}});
    }

    double moved = 0.0;
    if (lat.mode() == LatencyMode::Oracle) {
      std::vector<NodeId> todo;
      for (NodeId id : g.node_ids()) {
        if (g.node(id).parts.size() > 1 && !priced.count(id)) todo.push_back(id);
      }
      std::vector<std::optional<double>> fused(todo.size());
      detail::parallel_for(todo.size(), opt.threads,
                           [&](std::size_t i) { fused[i] = lat.fused(g.node(todo[i])); });
      for (std::size_t i = 0; i < todo.size(); ++i) {
        GdgNode& n = g.node(todo[i]);
        priced.insert(n.id);
        const double before = cached_duration(n);
        const bool take = fused[i] && *fused[i] < before - kMonotonicEps;
        res.trace.push_back({{"outer", outer},
                             {"fuse", n.id},
                             {"parts_ns", before},
                             {"fused_ns", fused[i] ? nlohmann::json(*fused[i]) : nlohmann::json()},
                             {"fused", take}});
        if (!take) continue;
        n.parts = {Part{n.gates}};
        n.duration_ns = *fused[i];
        moved = std::max(moved, before - *fused[i]);
      }
    }
    if (moved <= opt.tolerance_ns) break;
  }
  return res;
}

}  // namespace qagg
