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

#include "qagg/commute.hpp"
#include "qagg/gdg.hpp"

#include <set>
#include <utility>
#include <vector>

namespace qagg {

struct DiagonalBlockOptions {
  int window = 10;  ///< max gates per block
  double tol = kDiagonalTol;
};

/**
 * Contracts maximal runs of gates supported on a single qubit pair whose
 * product is diagonal. Each run must contain at least one two-qubit gate on
 * the pair, and nothing else may touch either qubit inside the run. Runs are
 * chosen greedily left to right, longest first. Returns the ids of the new
 * block nodes.
 */
inline std::vector<NodeId> detect_diagonal_blocks(Gdg& g, const DiagonalBlockOptions& opt = {}) {
  std::vector<NodeId> created;

  // Interacting pairs in order of first appearance.
  std::vector<std::pair<Qubit, Qubit>> pairs;
  for (NodeId id : g.topological_order()) {
    const auto& qs = g.node(id).qubits;
    if (qs.size() != 2) continue;
    const std::pair<Qubit, Qubit> p{qs[0], qs[1]};
    if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
  }

  for (const auto& [a, b] : pairs) {
    bool changed = true;
    while (changed) {
      changed = false;
      // Nodes touching a or b, in topological order. Stretches without a
      // node that leaves the pair are contiguous on both paths.
      std::vector<std::vector<NodeId>> stretches(1);
      for (NodeId id : g.topological_order()) {
        const GdgNode& n = g.node(id);
        if (!n.acts_on(a) && !n.acts_on(b)) continue;
        const bool inside = std::all_of(n.qubits.begin(), n.qubits.end(),
                                        [&](Qubit q) { return q == a || q == b; });
        if (inside) {
          stretches.back().push_back(id);
        } else if (!stretches.back().empty()) {
          stretches.emplace_back();
        }
      }
      const std::vector<Qubit> ctx{a, b};
      for (const auto& run : stretches) {
        const int m = static_cast<int>(run.size());
        for (int i = 0; i < m && !changed; ++i) {
          for (int j = std::min(m - 1, i + opt.window - 1); j > i; --j) {
            std::vector<Gate> gs;
            bool two_qubit = false;
            for (int k = i; k <= j; ++k) {
              const GdgNode& n = g.node(run[k]);
              two_qubit = two_qubit || n.width() == 2;
              gs.insert(gs.end(), n.gates.begin(), n.gates.end());
            }
            if (!two_qubit || static_cast<int>(gs.size()) > opt.window) continue;
            if (!is_diagonal(sequence_unitary(gs, ctx), opt.tol)) continue;
            std::vector<NodeId> members(run.begin() + i, run.begin() + j + 1);
            try {
              created.push_back(g.contract(members));
              changed = true;
            } catch (const ContractionError&) {
              continue;
            }
            break;
          }
        }
        if (changed) break;
      }
    }
  }
  // Blocks may later be merged into bigger blocks; report only survivors.
  std::vector<NodeId> alive;
  for (NodeId id : created) {
    if (g.contains(id)) alive.push_back(id);
  }
  return alive;
}

}  // namespace qagg
