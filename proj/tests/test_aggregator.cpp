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

#include "qagg/aggregator.hpp"
#include "qagg/asm.hpp"
#include "qagg/mapper.hpp"
#include "qagg/scheduler.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

namespace qagg {
namespace {

LatencyModel full_table() { return LatencyModel::table(testing::full_latency_table()); }

Gdg priced(const Circuit& c, const LatencyModel& lat = LatencyModel::table()) {
  Gdg g = build_gdg(c);
  assign_durations(g, lat);
  return g;
}

// G3 = CNOT(0,1); G4 (Rz on the control) and G5 (Rx on the target) commute with it.
const char* kToy =
    "qubits 2;\n"
    "h q1;\n"
    "h q0;\n"
    "cnot q0 q1;\n"
    "rz(0.7) q0;\n"
    "rx(1.26) q1;\n"
    "cnot q1 q0;\n";

TEST(CanAggregate, ToyCenterReachesEveryGate) {
  const Gdg g = priced(parse_asm(kToy));
  const auto groups = build_commutation_groups(g);
  for (NodeId other : {1, 2, 4, 5, 6}) EXPECT_TRUE(can_aggregate(g, groups, 3, other, 4)) << other;
}

TEST(IsMonotonic, ToyHasExactlyOneMonotonicAction) {
  const Gdg g = priced(parse_asm(kToy));
  const auto groups = build_commutation_groups(g);
  const auto acts = enumerate_actions(g, groups, 4);
  EXPECT_GE(acts.size(), 5u);
  std::vector<std::pair<NodeId, NodeId>> mono;
  for (const Action& a : acts) {
    if (a.monotonic()) mono.emplace_back(a.a, a.b);
  }
  EXPECT_EQ(mono, (std::vector<std::pair<NodeId, NodeId>>{{3, 6}}));
  EXPECT_TRUE(is_monotonic(g, groups, 3, 6, 4));
  EXPECT_FALSE(is_monotonic(g, groups, 3, 4, 4));
}

TEST(CanAggregate, DisjointSupportIsRejected) {
  const Gdg g = priced(parse_asm("qubits 2;\nh q0;\nh q1;\n"));
  EXPECT_FALSE(can_aggregate(g, singleton_groups(g), 1, 2, 4));
}

TEST(CanAggregate, InterposedNodeBlocksParentAndChild) {
  const Gdg g = priced(parse_asm("qubits 1;\nh q0;\nrx(0.3) q0;\nh q0;\n"));
  const auto groups = build_commutation_groups(g);
  EXPECT_FALSE(can_aggregate(g, groups, 1, 3, 4));
  EXPECT_TRUE(can_aggregate(g, groups, 1, 2, 4));
}

TEST(CanAggregate, CommutingSiblingsMoveTogether) {
  // Both Rz commute with the CNOT control; 1 and 3 sit in one group on q0.
  const Gdg g = priced(parse_asm("qubits 2;\nrz(0.1) q0;\ncnot q0 q1;\nrz(0.2) q0;\n"));
  const auto groups = build_commutation_groups(g);
  ASSERT_EQ(groups.per_qubit[0].size(), 1u);
  NodeId id = kRoot;
  const auto merged = merge_pair(g, groups, 1, 3, 4, &id);
  ASSERT_TRUE(merged.has_value());
  EXPECT_EQ(merged->node(id).qubits, (std::vector<Qubit>{0}));
  EXPECT_TRUE(equal_up_to_phase(circuit_unitary(merged->flatten()), circuit_unitary(g.flatten()), 1e-10));
  EXPECT_FALSE(can_aggregate(g, singleton_groups(g), 1, 3, 4));
}

TEST(CanAggregate, WidthLimit) {
  const Gdg g = priced(parse_asm("qubits 3;\ncnot q0 q1;\ncnot q1 q2;\n"));
  const auto groups = singleton_groups(g);
  EXPECT_FALSE(can_aggregate(g, groups, 1, 2, 2));
  EXPECT_TRUE(can_aggregate(g, groups, 1, 2, 3));
}

TEST(IsMonotonic, SequentialGatesOnIdleQubit) {
  const Gdg g = priced(parse_asm("qubits 2;\nh q0;\nrx(0.4) q0;\ncnot q0 q1;\n"));
  EXPECT_TRUE(is_monotonic(g, singleton_groups(g), 1, 2, 4));
}

Gdg fig6b() {
  // G1 (q0,q1) 54.9; G2 (q2) 13.7; G3 (q0,q1,q2) 42.0; G4 (q1,q2) 31.4; G5 (q0) 6.1.
  Gdg g(3);
  const std::vector<std::pair<std::vector<Gate>, double>> nodes = {
      {{gates::h(0), gates::h(1), gates::cnot(0, 1)}, 54.9},
      {{gates::h(2)}, 13.7},
      {{gates::cnot(1, 2), gates::swap(0, 1)}, 42.0},
      {{gates::cnot(1, 2), gates::rz(5.67, 2)}, 31.4},
      {{gates::rx(1.26, 0)}, 6.1},
  };
  for (const auto& [gs, d] : nodes) {
    const NodeId id = g.append({Part{gs}});
    g.node(id).duration_ns = d;
  }
  return g;
}

TEST(IsMonotonic, AggregatedExampleCriticalPath) {
  const Gdg g = fig6b();
  const auto cp = critical_path(g);
  EXPECT_NEAR(cp.total_ns, 128.3, 1e-9);
  EXPECT_EQ(cp.path, (std::vector<NodeId>{1, 3, 4}));
}

TEST(IsMonotonic, MergingTailIntoWideNodeDelaysDependent) {
  const Gdg g = fig6b();
  const auto groups = singleton_groups(g);
  ASSERT_TRUE(can_aggregate(g, groups, 3, 5, 4));
  const auto act = evaluate_action(g, groups, 3, 5, 4);
  ASSERT_TRUE(act.has_value());
  EXPECT_FALSE(act->monotonic());
  EXPECT_NEAR(act->critical_path_after_ns, 54.9 + 42.0 + 6.1 + 31.4, 1e-9);
}

TEST(AggregateLoop, NoAggregablePairsIsFixpoint) {
  const Gdg g = priced(parse_asm("qubits 2;\nh q0;\nh q1;\n"));
  const auto r = aggregate_loop(g, LatencyModel::table());
  EXPECT_EQ(r.gdg.node_ids(), g.node_ids());
  EXPECT_EQ(r.actions, 0);
  EXPECT_TRUE(r.trace.empty());
}

TEST(AggregateLoop, RequiresDurations) {
  const Gdg g = build_gdg(parse_asm("qubits 1;\nh q0;\n"));
  EXPECT_THROW(aggregate_loop(g, LatencyModel::table()), Error);
}

TEST(AggregateLoop, FrozenTableNeverLengthensRoutedGraphs) {
  std::mt19937_64 rng(1234);
  const LatencyModel lat = full_table();
  for (int trial = 0; trial < 100; ++trial) {
    const Topology t = trial % 2 ? Topology(2, 2) : Topology(2, 3);
    const int n = std::uniform_int_distribution<int>(2, std::min(4, t.size()))(rng);
    const Circuit c = testing::random_circuit(rng, n, 14);
    Gdg g = build_gdg(c);
    const auto s = list_schedule(g, lat);
    const auto r = route_swaps(g, s, initial_mapping(build_interaction_graph(c), t, trial), t);
    Gdg routed = r.gdg;
    assign_durations(routed, lat);
    AggregateOptions opt;
    opt.max_width = 3;
    opt.use_commutation = trial % 3 != 0;
    const auto out = aggregate_loop(routed, lat, opt);
    EXPECT_LE(critical_path(out.gdg).total_ns, critical_path(routed).total_ns + 1e-9) << "trial " << trial;
    EXPECT_LE(out.gdg.size(), routed.size());
    EXPECT_EQ(static_cast<int>(routed.size() - out.gdg.size()), out.actions);
    EXPECT_NO_THROW(out.gdg.audit());
    for (NodeId id : out.gdg.node_ids()) EXPECT_LE(out.gdg.node(id).width(), 3);
    if (t.size() <= 4) {
      EXPECT_TRUE(equal_up_to_phase(circuit_unitary(out.gdg.flatten()), circuit_unitary(routed.flatten()), 1e-8))
          << "trial " << trial;
    }
  }
}

LatencyModel scaled_oracle(double factor) {
  const LatencyModel table = LatencyModel::table();
  return LatencyModel::oracle([table, factor](const std::vector<Gate>& gs, const std::vector<Qubit>&) {
    double sum = 0.0;
    for (const Gate& g : gs) sum += table.gate(g);
    return gs.size() == 1 ? sum : factor * sum;
  });
}

TEST(AggregateLoop, OracleFusesWhenShorter) {
  const Circuit c = parse_asm(
      "qubits 2;\nh q0;\nh q1;\ncnot q0 q1;\nrz(5.67) q1;\ncnot q0 q1;\nrx(1.26) q0;\nrx(1.26) q1;\n");
  const LatencyModel lat = scaled_oracle(0.5);
  const Gdg g = priced(c, lat);
  AggregateOptions opt;
  opt.max_width = 2;
  opt.threads = 2;
  const auto r = aggregate_loop(g, lat, opt);
  EXPECT_LT(critical_path(r.gdg).total_ns, critical_path(g).total_ns);
  bool fused_multi = false;
  for (NodeId id : r.gdg.node_ids()) {
    const GdgNode& n = r.gdg.node(id);
    if (n.gates.size() > 1) {
      EXPECT_TRUE(n.fused());
      fused_multi = true;
    }
  }
  EXPECT_TRUE(fused_multi);
  EXPECT_LE(r.outer_iterations, opt.max_outer);
  EXPECT_TRUE(equal_up_to_phase(circuit_unitary(r.gdg.flatten()), circuit_unitary(c), 1e-10));
}

TEST(AggregateLoop, OracleSlowerThanPartsKeepsPartsSeparate) {
  const Circuit c = parse_asm("qubits 2;\ncnot q0 q1;\nrz(5.67) q1;\ncnot q0 q1;\n");
  const LatencyModel lat = scaled_oracle(1.5);
  const Gdg g = priced(c, lat);
  const auto r = aggregate_loop(g, lat);
  for (NodeId id : r.gdg.node_ids()) {
    const GdgNode& n = r.gdg.node(id);
    EXPECT_EQ(n.parts.size(), n.gates.size());
    EXPECT_NEAR(*n.duration_ns, lat.duration(n), 1e-9);
  }
  EXPECT_NEAR(critical_path(r.gdg).total_ns, critical_path(g).total_ns, 1e-9);
}

TEST(AggregateLoop, OracleFailurePropagates) {
  const LatencyModel lat = LatencyModel::oracle([](const std::vector<Gate>& gs, const std::vector<Qubit>&) -> double {
    if (gs.size() > 1) throw Error("synthesis failed");
    return 10.0;
  });
  const Gdg g = priced(parse_asm("qubits 1;\nh q0;\nrx(0.2) q0;\n"), lat);
  EXPECT_THROW(aggregate_loop(g, lat), Error);
}

TEST(AggregateLoop, TraceRecordsMerges) {
  const Gdg g = priced(parse_asm(kToy));
  const auto r = aggregate_loop(g, LatencyModel::table());
  ASSERT_GE(r.actions, 1);
  EXPECT_EQ(r.trace[0]["merge"], nlohmann::json({3, 6}));
  EXPECT_TRUE(r.trace[0].contains("predicted_gain_ns"));
}

}  // namespace
}  // namespace qagg
