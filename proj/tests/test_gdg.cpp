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

#include "qagg/diagonal_blocks.hpp"
#include "qagg/gdg.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace qagg {
namespace {

using gates::cnot;
using gates::h;
using gates::rz;

Circuit triangle() {
  Circuit c(3, "triangle");
  c.add(h(0)).add(h(1)).add(h(2));
  for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
    c.add(cnot(a, b)).add(rz(5.67, b)).add(cnot(a, b));
  }
  for (int q = 0; q < 3; ++q) c.add(gates::rx(1.26, q));
  return c;
}

TEST(Gdg, BuildChainsNodesPerQubit) {
  Circuit c(2);
  c.add(h(0)).add(cnot(0, 1)).add(rz(0.5, 1));
  const Gdg g = build_gdg(c);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.path(0), (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(g.path(1), (std::vector<NodeId>{2, 3}));
  EXPECT_EQ(g.parent(2, 0), 1);
  EXPECT_EQ(g.parent(2, 1), kRoot);
  EXPECT_EQ(g.child(2, 1), 3);
  EXPECT_EQ(g.child(3, 1), kSink);
  EXPECT_EQ(g.child(kRoot, 1), 2);
  EXPECT_NO_THROW(g.audit());
}

TEST(Gdg, CriticalPathIsLongestWeightedChain) {
  Circuit c(3);
  c.add(h(0)).add(h(1)).add(cnot(0, 1)).add(h(2));
  const Gdg g = build_gdg(c);
  const auto cp = critical_path(g, [](const GdgNode& n) {
    return n.is_root() ? 0.0 : (n.width() == 2 ? 10.0 : 1.0);
  });
  EXPECT_DOUBLE_EQ(cp.total_ns, 11.0);
  EXPECT_EQ(cp.path, (std::vector<NodeId>{1, 3}));
}

TEST(Gdg, FlattenReproducesCircuit) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Circuit c = testing::random_circuit(rng, 3, 12);
    const Gdg g = build_gdg(c);
    EXPECT_LT(phase_distance(circuit_unitary(g.flatten()), circuit_unitary(c)), 1e-10);
  }
}

TEST(Gdg, ContractMergesContiguousRun) {
  Circuit c(2);
  c.add(cnot(0, 1)).add(rz(0.3, 1)).add(cnot(0, 1)).add(h(0));
  Gdg g = build_gdg(c);
  const NodeId m = g.contract({1, 2, 3});
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.node(m).gates.size(), 3u);
  EXPECT_EQ(g.node(m).parts.size(), 3u);
  EXPECT_EQ(g.path(0), (std::vector<NodeId>{m, 4}));
  EXPECT_NO_THROW(g.audit());
  EXPECT_LT(phase_distance(circuit_unitary(g.flatten()), circuit_unitary(c)), 1e-12);
}

TEST(Gdg, ContractRejectsGapsWidthAndCycles) {
  Circuit c(3);
  c.add(cnot(0, 1)).add(h(1)).add(cnot(1, 2)).add(cnot(0, 2));
  Gdg g = build_gdg(c);
  EXPECT_THROW(g.contract({1, 3}), ContractionError);  // node 2 sits between on q1
  EXPECT_THROW(g.contract({1, 3, 4}, 2), ContractionError);
  // 1 and 4 are contiguous on q0 but 4 depends on 1 through 2,3.
  EXPECT_THROW(g.contract({1, 4}), ContractionError);
  EXPECT_EQ(g.size(), 4u);
  EXPECT_NO_THROW(g.audit());
}

TEST(CommutationGroups, CnotRzCnotSplitsOnTargetOnly) {
  Circuit c(2);
  c.add(cnot(0, 1)).add(rz(0.3, 1)).add(cnot(0, 1));
  const Gdg g = build_gdg(c);
  const auto groups = build_commutation_groups(g);
  ASSERT_EQ(groups.per_qubit[0].size(), 1u);
  EXPECT_EQ(groups.per_qubit[0][0], (std::vector<NodeId>{1, 3}));
  EXPECT_EQ(groups.per_qubit[1].size(), 3u);
  EXPECT_EQ(groups.group_of(1, 2), 1);
}

TEST(CommutationGroups, GroupMembersPairwiseCommute) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 30; ++i) {
    const Gdg g = build_gdg(testing::random_circuit(rng, 3, 15));
    const auto groups = build_commutation_groups(g);
    for (const auto& per : groups.per_qubit) {
      for (const auto& grp : per) {
        for (std::size_t a = 0; a < grp.size(); ++a) {
          for (std::size_t b = a + 1; b < grp.size(); ++b) {
            EXPECT_TRUE(commutes(Operator(g.node(grp[a]).gates), Operator(g.node(grp[b]).gates)).commutes);
          }
        }
      }
    }
  }
}

TEST(DiagonalBlocks, TriangleYieldsThreeCommutingBlocks) {
  Gdg g = build_gdg(triangle());
  const auto blocks = detect_diagonal_blocks(g);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(g.size(), 9u);
  for (NodeId b : blocks) {
    EXPECT_EQ(g.node(b).gates.size(), 3u);
    EXPECT_FALSE(g.node(b).fused());
  }
  const auto groups = build_commutation_groups(g);
  // Each qubit: H, two blocks in one group, Rx.
  for (int q = 0; q < 3; ++q) {
    ASSERT_EQ(groups.per_qubit[q].size(), 3u) << "q" << q;
    EXPECT_EQ(groups.per_qubit[q][1].size(), 2u);
  }
  EXPECT_LT(phase_distance(circuit_unitary(g.flatten()), circuit_unitary(triangle())), 1e-10);
}

TEST(DiagonalBlocks, NonDiagonalRunsStayUntouched) {
  Circuit c(2);
  c.add(cnot(0, 1)).add(h(1)).add(cnot(0, 1));
  Gdg g = build_gdg(c);
  EXPECT_TRUE(detect_diagonal_blocks(g).empty());
  EXPECT_EQ(g.size(), 3u);
}

TEST(DiagonalBlocks, PreservesSemanticsOnRandomCircuits) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    const Circuit c = testing::random_circuit(rng, 4, 20);
    Gdg g = build_gdg(c);
    detect_diagonal_blocks(g);
    EXPECT_NO_THROW(g.audit());
    EXPECT_LT(phase_distance(circuit_unitary(g.flatten()), circuit_unitary(c)), 1e-10);
    for (NodeId id : g.node_ids()) EXPECT_LE(g.node(id).gates.size(), 10u);
  }
}

}  // namespace
}  // namespace qagg
