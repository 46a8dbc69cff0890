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
 * @file mapper.hpp
 * @brief Grid placement by recursive bisection, and SWAP routing.
 *
 * Physical sites are numbered row-major: site = row * cols + col.
 */

#pragma once

#include "qagg/gdg.hpp"
#include "qagg/scheduler.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <regex>
#include <string>
#include <vector>

namespace qagg {

class RoutingError : public Error {
 public:
  using Error::Error;
};

struct Topology {
  int rows = 1;
  int cols = 1;

  Topology() = default;
  Topology(int r, int c) : rows(r), cols(c) {
    if (r <= 0 || c <= 0) throw Error("topology: grid dimensions must be positive");
  }

  /// Parses "grid:RxC".
  static Topology parse(const std::string& spec) {
    static const std::regex re(R"(grid:(\d+)x(\d+))", std::regex::icase);
    std::smatch m;
    if (!std::regex_match(spec, m, re)) throw Error("topology must look like grid:RxC, got '" + spec + "'");
    return Topology(std::stoi(m[1]), std::stoi(m[2]));
  }
  /// Smallest near-square grid holding n qubits: floor(sqrt n) rows.
  static Topology for_qubits(int n) {
    int r = 1;
    while ((r + 1) * (r + 1) <= n) ++r;
    return Topology(r, (n + r - 1) / r);
  }

  int size() const { return rows * cols; }
  int row(int site) const { return site / cols; }
  int col(int site) const { return site % cols; }
  int site(int r, int c) const { return r * cols + c; }
  int distance(int a, int b) const { return std::abs(row(a) - row(b)) + std::abs(col(a) - col(b)); }
  bool adjacent(int a, int b) const { return distance(a, b) == 1; }

  /// All adjacent site pairs (a < b), row-major.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (c + 1 < cols) out.emplace_back(site(r, c), site(r, c + 1));
        if (r + 1 < rows) out.emplace_back(site(r, c), site(r + 1, c));
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  std::string to_string() const { return "grid:" + std::to_string(rows) + "x" + std::to_string(cols); }
};

struct InteractionGraph {
  int num_vertices = 0;
  std::map<std::pair<int, int>, int> weight;  ///< key (a, b) with a < b

  int w(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto it = weight.find({a, b});
    return it == weight.end() ? 0 : it->second;
  }
};

inline InteractionGraph build_interaction_graph(const Circuit& c) {
  InteractionGraph gr;
  gr.num_vertices = c.num_qubits;
  for (const Gate& g : c.gates) {
    if (g.arity() < 2) continue;
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      for (std::size_t j = i + 1; j < g.qubits.size(); ++j) {
        int a = g.qubits[i], b = g.qubits[j];
        if (a > b) std::swap(a, b);
        ++gr.weight[{a, b}];
      }
    }
  }
  return gr;
}

/// Sum of weights of edges with one endpoint on each side.
inline int cut_weight(const InteractionGraph& gr, const std::vector<int>& a, const std::vector<int>& b) {
  int cut = 0;
  for (int x : a) {
    for (int y : b) cut += gr.w(x, y);
  }
  return cut;
}

struct Bisection {
  std::vector<int> a, b;  ///< sorted
  int cut = 0;
};

/**
 * Splits `vertices` into parts of size `size_a` and the rest, minimizing the
 * crossing weight with Kernighan-Lin passes from `restarts` seeded random
 * starts. Deterministic for a given seed.
 */
inline Bisection partition(const InteractionGraph& gr, std::vector<int> vertices, int size_a,
                           std::uint64_t seed = 1, int restarts = 8) {
  const int n = static_cast<int>(vertices.size());
  if (size_a < 0 || size_a > n) throw Error("partition: part size out of range");
  std::sort(vertices.begin(), vertices.end());
  Bisection best;
  best.cut = std::numeric_limits<int>::max();
  if (size_a == 0 || size_a == n) {
    best.a.assign(vertices.begin(), vertices.begin() + size_a);
    best.b.assign(vertices.begin() + size_a, vertices.end());
    best.cut = 0;
    return best;
  }
  std::mt19937_64 rng(seed);
  for (int r = 0; r < restarts; ++r) {
    std::vector<int> order = vertices;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> side(n);  // true = A, indexed by position in `vertices`
    std::map<int, int> pos;
    for (int i = 0; i < n; ++i) pos[vertices[i]] = i;
    for (int i = 0; i < n; ++i) side[pos[order[i]]] = i < size_a;

    // D value: external minus internal weight under assignment `sd`.
    auto d_value = [&](const std::vector<bool>& sd, int i) {
      int ext = 0, in = 0;
      for (int j = 0; j < n; ++j) {
        if (i != j) (sd[i] == sd[j] ? in : ext) += gr.w(vertices[i], vertices[j]);
      }
      return ext - in;
    };
    for (bool improved = true; improved;) {
      improved = false;
      std::vector<bool> cur = side;
      std::vector<bool> locked(n, false);
      std::vector<std::pair<int, int>> swaps;
      std::vector<int> gains;
      const int steps = std::min(size_a, n - size_a);
      for (int step = 0; step < steps; ++step) {
        int best_gain = std::numeric_limits<int>::min(), bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
          if (locked[i] || !cur[i]) continue;
          const int di = d_value(cur, i);
          for (int j = 0; j < n; ++j) {
            if (locked[j] || cur[j]) continue;
            const int gain = di + d_value(cur, j) - 2 * gr.w(vertices[i], vertices[j]);
            if (gain > best_gain) {
              best_gain = gain;
              bi = i;
              bj = j;
            }
          }
        }
        locked[bi] = locked[bj] = true;
        cur[bi] = false;
        cur[bj] = true;
        swaps.emplace_back(bi, bj);
        gains.push_back(best_gain);
      }
      // Keep the prefix of swaps with the largest positive total gain.
      int acc = 0, best_acc = 0, best_k = 0;
      for (int k = 0; k < static_cast<int>(gains.size()); ++k) {
        acc += gains[k];
        if (acc > best_acc) {
          best_acc = acc;
          best_k = k + 1;
        }
      }
      for (int k = 0; k < best_k; ++k) {
        side[swaps[k].first] = false;
        side[swaps[k].second] = true;
      }
      improved = best_k > 0;
    }
    Bisection cand;
    for (int i = 0; i < n; ++i) (side[i] ? cand.a : cand.b).push_back(vertices[i]);
    cand.cut = cut_weight(gr, cand.a, cand.b);
    if (cand.cut < best.cut) best = std::move(cand);
  }
  return best;
}

/// Balanced bisection of the whole graph: sizes differ by at most one.
inline Bisection bisect(const InteractionGraph& gr, std::uint64_t seed = 1) {
  if (gr.num_vertices < 2) throw Error("bisect: need at least two vertices");
  std::vector<int> vs(gr.num_vertices);
  for (int i = 0; i < gr.num_vertices; ++i) vs[i] = i;
  return partition(gr, vs, gr.num_vertices / 2, seed);
}

/// Logical-to-physical placement. phys_of[l] is the site of logical qubit l.
struct Mapping {
  std::vector<int> phys_of;

  int size() const { return static_cast<int>(phys_of.size()); }
  /// Inverse map over `sites` sites; -1 marks an empty site.
  std::vector<int> logical_at(int sites) const {
    std::vector<int> out(sites, -1);
    for (int l = 0; l < size(); ++l) out.at(phys_of[l]) = l;
    return out;
  }
  bool is_injective(int sites) const {
    std::vector<bool> used(sites, false);
    for (int p : phys_of) {
      if (p < 0 || p >= sites || used[p]) return false;
      used[p] = true;
    }
    return true;
  }
};

/// Total weighted Manhattan distance of a placement.
inline long placement_cost(const InteractionGraph& gr, const Mapping& m, const Topology& t) {
  long cost = 0;
  for (const auto& [e, w] : gr.weight) cost += static_cast<long>(w) * t.distance(m.phys_of[e.first], m.phys_of[e.second]);
  return cost;
}

namespace detail {

struct Region {
  int r0, c0, rows, cols;
  int size() const { return rows * cols; }
};

inline long partial_cost(const InteractionGraph& gr, const std::map<int, int>& at, const Topology& t) {
  long cost = 0;
  for (const auto& [e, w] : gr.weight) {
    auto a = at.find(e.first), b = at.find(e.second);
    if (a != at.end() && b != at.end()) cost += static_cast<long>(w) * t.distance(a->second, b->second);
  }
  return cost;
}

/// Mirrors a placement inside its region.
inline std::map<int, int> reflect(const std::map<int, int>& at, const Region& g, const Topology& t, bool flip_rows,
                                  bool flip_cols) {
  std::map<int, int> out;
  for (const auto& [v, s] : at) {
    int r = t.row(s), c = t.col(s);
    if (flip_rows) r = g.r0 + (g.r0 + g.rows - 1 - r);
    if (flip_cols) c = g.c0 + (g.c0 + g.cols - 1 - c);
    out[v] = t.site(r, c);
  }
  return out;
}

inline std::map<int, int> place(const InteractionGraph& gr, const std::vector<int>& vs, const Region& g,
                                const Topology& t, std::uint64_t seed) {
  std::map<int, int> best;
  if (vs.empty()) return best;
  if (vs.size() == 1) {
    best[vs[0]] = t.site(g.r0, g.c0);
    return best;
  }
  long best_cost = std::numeric_limits<long>::max();
  // Try both cut orientations and keep the cheaper placement.
  for (int horizontal = 0; horizontal < 2; ++horizontal) {
    Region a = g, b = g;
    if (horizontal) {
      if (g.rows < 2) continue;
      a.rows = g.rows / 2;
      b.r0 = g.r0 + a.rows;
      b.rows = g.rows - a.rows;
    } else {
      if (g.cols < 2) continue;
      a.cols = g.cols / 2;
      b.c0 = g.c0 + a.cols;
      b.cols = g.cols - a.cols;
    }
    const int n = static_cast<int>(vs.size());
    // Fill proportionally to capacity, never overflowing either side.
    int size_a = static_cast<int>(std::lround(static_cast<double>(n) * a.size() / g.size()));
    size_a = std::clamp(size_a, std::max(0, n - b.size()), std::min(n, a.size()));
    const Bisection part = partition(gr, vs, size_a, seed);
    const auto pa = place(gr, part.a, a, t, seed + 1);
    const auto pb = place(gr, part.b, b, t, seed + 2);
    for (int fa = 0; fa < 4; ++fa) {
      const auto ra = reflect(pa, a, t, fa & 1, fa & 2);
      for (int fb = 0; fb < 4; ++fb) {
        auto merged = ra;
        for (const auto& kv : reflect(pb, b, t, fb & 1, fb & 2)) merged.insert(kv);
        const long cost = partial_cost(gr, merged, t);
        if (cost < best_cost) {
          best_cost = cost;
          best = std::move(merged);
        }
      }
    }
  }
  return best;
}

}  // namespace detail

/**
 * Recursive bisection placement: the vertex set and the grid region are cut
 * in lockstep until single sites remain, each half is mirrored to face its
 * sibling, and pairwise site exchanges polish the result.
 */
inline Mapping initial_mapping(const InteractionGraph& gr, const Topology& t, std::uint64_t seed = 1) {
  const int n = gr.num_vertices;
  if (n > t.size()) {
    throw RoutingError("initial_mapping: " + std::to_string(n) + " qubits do not fit on " + t.to_string());
  }
  std::vector<int> vs(n);
  for (int i = 0; i < n; ++i) vs[i] = i;
  const auto at = detail::place(gr, vs, {0, 0, t.rows, t.cols}, t, seed);
  Mapping m;
  m.phys_of.resize(n);
  for (const auto& [v, s] : at) m.phys_of[v] = s;

  // Hill climbing over exchanges of a qubit with another qubit or an empty site.
  long cost = placement_cost(gr, m, t);
  for (bool improved = true; improved;) {
    improved = false;
    for (int v = 0; v < n; ++v) {
      for (int s = 0; s < t.size(); ++s) {
        if (s == m.phys_of[v]) continue;
        Mapping trial = m;
        const auto occupant = m.logical_at(t.size())[s];
        if (occupant >= 0) trial.phys_of[occupant] = m.phys_of[v];
        trial.phys_of[v] = s;
        const long c = placement_cost(gr, trial, t);
        if (c < cost) {
          cost = c;
          m = std::move(trial);
          improved = true;
        }
      }
    }
  }
  return m;
}

struct RoutedProgram {
  Gdg gdg;                     ///< over physical sites
  std::map<NodeId, NodeId> origin;  ///< routed id -> source id, kRoot for SWAPs
  Mapping initial;
  Mapping final;
  int swap_count = 0;
};

namespace detail {

inline Gate relabel(const Gate& g, const std::vector<int>& phys_of) {
  Gate out = g;
  for (Qubit& q : out.qubits) q = phys_of.at(q);
  return out;
}

/// Shortest grid path from a to b, closing row distance first.
inline std::vector<int> grid_path(int a, int b, const Topology& t) {
  std::vector<int> p{a};
  int r = t.row(a), c = t.col(a);
  while (r != t.row(b)) {
    r += r < t.row(b) ? 1 : -1;
    p.push_back(t.site(r, c));
  }
  while (c != t.col(b)) {
    c += c < t.col(b) ? 1 : -1;
    p.push_back(t.site(r, c));
  }
  return p;
}

}  // namespace detail

/**
 * Walks the schedule in order and rewrites every node onto physical sites.
 * Before a two-qubit node whose operands are not adjacent, SWAPs move both
 * operands along a shortest path until they meet in the middle. Mapping
 * updates are permanent.
 */
inline RoutedProgram route_swaps(const Gdg& g, const Schedule& s, const Mapping& m, const Topology& t) {
  if (m.size() != g.num_qubits()) throw RoutingError("route_swaps: mapping does not cover the circuit");
  if (!m.is_injective(t.size())) throw RoutingError("route_swaps: mapping is not injective on " + t.to_string());
  RoutedProgram out;
  out.gdg = Gdg(t.size());
  out.initial = m;
  Mapping cur = m;
  std::vector<int> logical_at = m.logical_at(t.size());

  auto do_swap = [&](int sa, int sb) {
    const NodeId id = out.gdg.append(gates::swap(sa, sb));
    out.origin[id] = kRoot;
    ++out.swap_count;
    const int la = logical_at[sa], lb = logical_at[sb];
    std::swap(logical_at[sa], logical_at[sb]);
    if (la >= 0) cur.phys_of[la] = sb;
    if (lb >= 0) cur.phys_of[lb] = sa;
  };

  for (const auto& e : s.entries) {
    const GdgNode& n = g.node(e.node);
    if (n.width() > 2) {
      throw RoutingError("route_swaps: node " + std::to_string(n.id) + " spans " + std::to_string(n.width()) +
                         " qubits; only 1- and 2-qubit instructions can be routed");
    }
    if (n.width() == 2) {
      const int pa = cur.phys_of[n.qubits[0]], pb = cur.phys_of[n.qubits[1]];
      if (!t.adjacent(pa, pb)) {
        const auto path = detail::grid_path(pa, pb, t);
        const int k = static_cast<int>(path.size()) - 1;  // distance
        const int from_a = k / 2;                         // a advances, b covers the rest
        for (int i = 0; i < from_a; ++i) do_swap(path[i], path[i + 1]);
        for (int i = k; i > from_a + 1; --i) do_swap(path[i], path[i - 1]);
      }
    }
    std::vector<Part> parts;
    for (const Part& p : n.parts) {
      Part q;
      for (const Gate& gate : p.gates) q.gates.push_back(detail::relabel(gate, cur.phys_of));
      parts.push_back(std::move(q));
    }
    const NodeId id = out.gdg.append(std::move(parts));
    out.gdg.node(id).duration_ns = n.duration_ns;
    out.origin[id] = n.id;
  }
  out.final = cur;
  return out;
}

/// Flattened routed program as a circuit over physical sites.
inline Circuit routed_circuit(const RoutedProgram& r) { return r.gdg.flatten(); }

}  // namespace qagg
