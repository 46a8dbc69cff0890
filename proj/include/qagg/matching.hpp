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

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

namespace qagg {

/// Candidate instructions as a graph over qubits: two-qubit instructions are
/// edges, one-qubit instructions are self-loops.
struct ComputationalGraph {
  struct Edge {
    int node;  ///< instruction id
    int u, v;  ///< qubits
  };
  struct Loop {
    int node;
    int v;
  };
  std::vector<int> vertices;
  std::vector<Edge> edges;
  std::vector<Loop> self_loops;
};

namespace detail {

/// Edmonds' blossom algorithm, O(V^3). Vertices are 0..n-1.
class Blossom {
 public:
  explicit Blossom(int n) : n_(n), adj_(n) {}

  void add_edge(int u, int v) {
    if (u == v) return;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }

  /// match[v] = partner or -1.
  std::vector<int> solve() {
    match_.assign(n_, -1);
    for (int v = 0; v < n_; ++v) {
      if (match_[v] == -1) {
        const int u = find_path(v);
        if (u != -1) augment(u);
      }
    }
    return match_;
  }

  int size() {
    const auto m = solve();
    int c = 0;
    for (int v = 0; v < n_; ++v) c += (m[v] > v);
    return c;
  }

 private:
  int lca(int a, int b) {
    std::vector<bool> used(n_, false);
    for (;;) {
      a = base_[a];
      used[a] = true;
      if (match_[a] == -1) break;
      a = parent_[match_[a]];
    }
    for (;;) {
      b = base_[b];
      if (used[b]) return b;
      b = parent_[match_[b]];
    }
  }

  void mark_path(int v, int b, int child) {
    while (base_[v] != b) {
      blossom_[base_[v]] = blossom_[base_[match_[v]]] = true;
      parent_[v] = child;
      child = match_[v];
      v = parent_[match_[v]];
    }
  }

  int find_path(int root) {
    used_.assign(n_, false);
    parent_.assign(n_, -1);
    base_.resize(n_);
    std::iota(base_.begin(), base_.end(), 0);
    used_[root] = true;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int to : adj_[v]) {
        if (base_[v] == base_[to] || match_[v] == to) continue;
        if (to == root || (match_[to] != -1 && parent_[match_[to]] != -1)) {
          const int cur = lca(v, to);
          blossom_.assign(n_, false);
          mark_path(v, cur, to);
          mark_path(to, cur, v);
          for (int i = 0; i < n_; ++i) {
            if (blossom_[base_[i]]) {
              base_[i] = cur;
              if (!used_[i]) {
                used_[i] = true;
                q.push(i);
              }
            }
          }
        } else if (parent_[to] == -1) {
          parent_[to] = v;
          if (match_[to] == -1) return to;
          used_[match_[to]] = true;
          q.push(match_[to]);
        }
      }
    }
    return -1;
  }

  void augment(int v) {
    while (v != -1) {
      const int pv = parent_[v];
      const int ppv = match_[pv];
      match_[v] = pv;
      match_[pv] = v;
      v = ppv;
    }
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_, parent_, base_;
  std::vector<bool> used_, blossom_;
};

}  // namespace detail

/// Maximum cardinality matching size of a general graph given as edge list
/// over vertex indices 0..n-1.
inline int maximum_matching_size(int n, const std::vector<std::pair<int, int>>& edges) {
  detail::Blossom b(n);
  for (auto [u, v] : edges) b.add_edge(u, v);
  return b.size();
}

/**
 * Maximum-cardinality set of vertex-disjoint edges, then every self-loop on a
 * vertex the chosen edges leave free. Among maximum matchings the one whose
 * sorted instruction-id list is lexicographically smallest is returned.
 * Result: sorted instruction ids.
 */
inline std::vector<int> max_matching(const ComputationalGraph& gc) {
  std::map<int, int> index;
  auto vid = [&](int q) {
    auto [it, inserted] = index.emplace(q, static_cast<int>(index.size()));
    return it->second;
  };
  for (int v : gc.vertices) vid(v);
  std::vector<ComputationalGraph::Edge> edges = gc.edges;
  for (const auto& e : edges) {
    vid(e.u);
    vid(e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
  const int n = static_cast<int>(index.size());

  std::vector<int> chosen;
  std::vector<bool> used(n, false);
  auto remaining_max = [&](std::size_t from) {
    std::vector<std::pair<int, int>> es;
    for (std::size_t i = from; i < edges.size(); ++i) {
      const int u = index.at(edges[i].u), v = index.at(edges[i].v);
      if (!used[u] && !used[v]) es.emplace_back(u, v);
    }
    return maximum_matching_size(n, es);
  };
  int target = remaining_max(0);
  for (std::size_t i = 0; i < edges.size() && target > 0; ++i) {
    const int u = index.at(edges[i].u), v = index.at(edges[i].v);
    if (used[u] || used[v] || u == v) continue;
    used[u] = used[v] = true;
    if (1 + remaining_max(i + 1) == target) {
      chosen.push_back(edges[i].node);
      --target;
    } else {
      used[u] = used[v] = false;
    }
  }
  auto loops = gc.self_loops;
  std::sort(loops.begin(), loops.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
  for (const auto& l : loops) {
    const int v = vid(l.v);
    if (v >= static_cast<int>(used.size())) used.resize(v + 1, false);
    if (!used[v]) {
      used[v] = true;
      chosen.push_back(l.node);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace qagg
