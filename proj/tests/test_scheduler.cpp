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
#include "qagg/scheduler.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace qagg {
namespace {

using gates::cnot;
using gates::h;
using gates::rz;

const LatencyModel kTable = LatencyModel::table();

double unit_width(const GdgNode& n) { return n.is_root() ? 0.0 : 10.0 * n.width() + n.gates.size(); }

TEST(Latency, TableLookups) {
  Circuit c(2);
  c.add(cnot(0, 1)).add(h(0)).add(rz(1.0, 1)).add(gates::rx(2.0, 0)).add(gates::swap(0, 1));
  const Gdg g = build_gdg(c);
  EXPECT_DOUBLE_EQ(kTable.duration(g.node(1)), 47.1);
  EXPECT_DOUBLE_EQ(kTable.duration(g.node(2)), 13.7);
  EXPECT_DOUBLE_EQ(kTable.duration(g.node(3)), 9.8);
  EXPECT_DOUBLE_EQ(kTable.duration(g.node(4)), 6.1);
  EXPECT_DOUBLE_EQ(kTable.duration(g.node(5)), 50.1);
  EXPECT_DOUBLE_EQ(kTable.duration(g.node(kRoot)), 0.0);
}

TEST(Latency, FusedInstructionNeedsOracle) {
  Gdg g(2);
  const NodeId id = g.append(std::vector<Part>{Part{{cnot(0, 1), rz(5.67, 1), cnot(0, 1)}}});
  EXPECT_THROW(kTable.duration(g.node(id)), Error);
  const NodeId gate_based = g.append(std::vector<Part>{Part{{cnot(0, 1)}}, Part{{rz(5.67, 1)}}});
  EXPECT_DOUBLE_EQ(kTable.duration(g.node(gate_based)), 47.1 + 9.8);
}

TEST(Latency, JsonOverride) {
  LatencyModel m = LatencyModel::table();
  m.merge_table(nlohmann::json{{"cnot", 30.0}, {"iswap", 12.5}});
  EXPECT_DOUBLE_EQ(m.gate(cnot(0, 1)), 30.0);
  EXPECT_DOUBLE_EQ(m.gate(gates::iswap(0, 1)), 12.5);
  EXPECT_THROW(m.merge_table(nlohmann::json{{"h", -1.0}}), Error);
  EXPECT_THROW(kTable.gate(gates::iswap(0, 1)), Error);
}

TEST(Schedule, ChainIsSequential) {
  Circuit c(1);
  c.add(h(0)).add(rz(0.1, 0)).add(h(0));
  const Gdg g = build_gdg(c);
  const Schedule s = list_schedule(g, kTable);
  EXPECT_DOUBLE_EQ(s.makespan_ns, 13.7 + 9.8 + 13.7);
  EXPECT_DOUBLE_EQ(s.entry(3).start_ns, 13.7 + 9.8);
}

TEST(Schedule, IndependentGatesStartTogether) {
  Circuit c(2);
  c.add(h(0)).add(h(1));
  const Schedule s = list_schedule(build_gdg(c), kTable);
  EXPECT_DOUBLE_EQ(s.entry(1).start_ns, 0.0);
  EXPECT_DOUBLE_EQ(s.entry(2).start_ns, 0.0);
}

TEST(Schedule, ListScheduleMakespanIsCriticalPath) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const Gdg g = build_gdg(testing::random_circuit(rng, 4, 20));
    EXPECT_NEAR(list_schedule(g, unit_width).makespan_ns, critical_path(g, unit_width).total_ns, 1e-9);
  }
}

TEST(Schedule, TriangleBlocksOverlapInFirstLayer) {
  Circuit c(3);
  for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
    c.add(cnot(a, b)).add(rz(5.67, b)).add(cnot(a, b));
  }
  Gdg g = build_gdg(c);
  detect_diagonal_blocks(g);
  ASSERT_EQ(g.size(), 3u);
  const auto groups = build_commutation_groups(g);
  auto block = [](const GdgNode& n) { return n.is_root() ? 0.0 : 100.0; };
  const Schedule s = cls_schedule(g, groups, block);
  // Three pairwise-overlapping blocks on 3 qubits: one per layer is forced.
  EXPECT_DOUBLE_EQ(s.makespan_ns, 300.0);
  EXPECT_TRUE(validate_schedule(g, groups, s).empty());
}

TEST(Schedule, CommutationBeatsDependenceOrder) {
  // Rz on the control commutes back through the CNOT and fills the gap
  // while the target is still busy.
  Circuit c(2);
  c.add(h(1)).add(cnot(0, 1)).add(rz(0.4, 0));
  const Gdg g = build_gdg(c);
  auto d = [](const GdgNode& n) { return n.is_root() ? 0.0 : (n.width() == 2 ? 40.0 : 10.0); };
  const double asap = list_schedule(g, d).makespan_ns;
  const Schedule s = cls_schedule(g, build_commutation_groups(g), d);
  EXPECT_DOUBLE_EQ(asap, 60.0);
  EXPECT_DOUBLE_EQ(s.makespan_ns, 50.0);
  EXPECT_DOUBLE_EQ(s.entry(3).start_ns, 0.0);
}

TEST(Schedule, RandomCircuitsValidAndSemanticallySafe) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 3;
    const Circuit c = testing::random_circuit(rng, n, 20);
    Gdg g = build_gdg(c);
    if (i % 2) detect_diagonal_blocks(g);
    const auto groups = build_commutation_groups(g);
    const Schedule s = cls_schedule(g, groups, unit_width);
    EXPECT_TRUE(validate_schedule(g, groups, s).empty());
    EXPECT_LT(phase_distance(circuit_unitary(scheduled_circuit(g, s)), circuit_unitary(c)), 1e-8);
    EXPECT_LE(s.makespan_ns, list_schedule(g, unit_width).makespan_ns + 1e-9);
  }
}

TEST(Schedule, InconsistentGroupsDeadlock) {
  Circuit c(2);
  c.add(cnot(0, 1)).add(cnot(1, 0));
  const Gdg g = build_gdg(c);
  CommutationGroups bad;
  bad.per_qubit = {{{1}, {2}}, {{2}, {1}}};
  EXPECT_THROW(cls_schedule(g, bad, unit_width), DeadlockError);
}

TEST(Schedule, TimelineShowsOccupancy) {
  Circuit c(2);
  c.add(h(0)).add(cnot(0, 1));
  const Schedule s = list_schedule(build_gdg(c), [](const GdgNode& n) { return n.is_root() ? 0.0 : 10.0; });
  EXPECT_EQ(render_timeline(s, 2, 10.0), "q0  |12|\nq1  |.2|\n");
}

}  // namespace
}  // namespace qagg
