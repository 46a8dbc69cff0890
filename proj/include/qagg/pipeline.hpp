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
 * @file pipeline.hpp
 * @brief End-to-end compilation.
 *
 * parse -> GDG -> [diagonal blocks] -> commutation groups -> logical
 * schedule -> placement -> routing -> [aggregation] -> durations -> final
 * schedule -> pulses -> sampled verification.
 *
 * A strategy with more freedom also evaluates the strategies it extends
 * (cls and agg extend isa, cls+agg extends cls and agg) and keeps the
 * shortest result, so adding a pass never lengthens the program.
 */

#pragma once

#include "qagg/aggregator.hpp"
#include "qagg/asm.hpp"
#include "qagg/diagonal_blocks.hpp"
#include "qagg/mapper.hpp"
#include "qagg/optctrl/min_time.hpp"
#include "qagg/scheduler.hpp"
#include "qagg/verify.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qagg {

enum class Strategy { Isa, Cls, Agg, ClsAgg };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Isa: return "isa";
    case Strategy::Cls: return "cls";
    case Strategy::Agg: return "agg";
    case Strategy::ClsAgg: return "cls+agg";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "isa") return Strategy::Isa;
  if (s == "cls") return Strategy::Cls;
  if (s == "agg") return Strategy::Agg;
  if (s == "cls+agg") return Strategy::ClsAgg;
  throw Error("unknown strategy '" + s + "' (expected isa, cls, agg or cls+agg)");
}

inline bool uses_cls(Strategy s) { return s == Strategy::Cls || s == Strategy::ClsAgg; }
inline bool uses_agg(Strategy s) { return s == Strategy::Agg || s == Strategy::ClsAgg; }

struct CompileOptions {
  Strategy strategy = Strategy::ClsAgg;
  std::optional<Topology> topology;  ///< default: near-square grid for the circuit
  int max_width = 4;                 ///< q_L
  LatencyMode latency = LatencyMode::Table;
  std::map<std::string, double> table = LatencyModel::default_table();
  optctrl::ModelParams model;
  optctrl::MinTimeConfig min_time;
  std::uint64_t seed = 1;
  int threads = 0;          ///< oracle workers; 0 = hardware concurrency
  int verify_samples = 10;
  bool compare_baseline = true;  ///< also compile isa for the speedup figure
};

/// Latency accounting shared by every compilation that uses one oracle.
class LatencyContext {
 public:
  explicit LatencyContext(const CompileOptions& opt)
      : mode_(opt.latency), table_(LatencyModel::table(opt.table)) {
    if (mode_ == LatencyMode::Oracle) {
      optctrl::MinTimeConfig cfg = opt.min_time;
      cfg.optimizer.seed = opt.seed;
      oracle_ = std::make_shared<optctrl::LatencyOracle>(opt.model, cfg);
    }
  }

  LatencyMode mode() const { return mode_; }
  const std::shared_ptr<optctrl::LatencyOracle>& oracle() const { return oracle_; }

  /// Logical qubits have no layout yet: parts are priced on a local chain.
  LatencyModel logical() const {
    if (mode_ == LatencyMode::Table) return table_;
    auto o = oracle_;
    return LatencyModel::oracle([o](const std::vector<Gate>& gs, const std::vector<Qubit>& qs) {
      return guarded(*o, gs, qs, optctrl::chain_couplings(static_cast<int>(qs.size())))->result.duration_ns;
    });
  }

  /// Physical parts use the couplings of the grid.
  LatencyModel physical(const Topology& t) const {
    if (mode_ == LatencyMode::Table) return table_;
    auto o = oracle_;
    LatencyModel m = LatencyModel::oracle([o, t](const std::vector<Gate>& gs, const std::vector<Qubit>& qs) {
      return guarded(*o, gs, qs, physical_couplings(qs, t))->result.duration_ns;
    });
    m.with_fused([o, t](const std::vector<Part>& parts) -> std::optional<double> {
      std::vector<std::vector<Gate>> seq;
      for (const Part& p : parts) seq.push_back(p.gates);
      auto rec = o->query_fused(seq, [&t](const std::vector<Qubit>& qs) { return physical_couplings(qs, t); });
      if (!rec) return std::nullopt;
      return rec->result.duration_ns;
    });
    return m;
  }

  std::shared_ptr<const optctrl::PulseRecord> pulse(const std::vector<Gate>& gs, const std::vector<Qubit>& qs,
                                                    const Topology& t) const {
    if (!oracle_) return nullptr;
    return guarded(*oracle_, gs, qs, physical_couplings(qs, t));
  }

  /// Cached fused duration on the grid, if any; never runs the optimizer.
  DurationEstimate estimate(const Topology& t) const {
    if (!oracle_) return nullptr;
    auto o = oracle_;
    return [o, t](const std::vector<Gate>& gs, const std::vector<Qubit>& qs) -> std::optional<double> {
      auto rec = o->peek(gs, qs, physical_couplings(qs, t));
      if (!rec) return std::nullopt;
      return rec->result.duration_ns;
    };
  }

  static std::vector<std::pair<int, int>> physical_couplings(const std::vector<Qubit>& qs, const Topology& t) {
    return optctrl::local_couplings(qs, [&t](Qubit a, Qubit b) { return t.adjacent(a, b); });
  }

 private:
  static std::shared_ptr<const optctrl::PulseRecord> guarded(optctrl::LatencyOracle& o, const std::vector<Gate>& gs,
                                                             const std::vector<Qubit>& qs,
                                                             const std::vector<std::pair<int, int>>& couplings) {
    try {
      return o.query(gs, qs, couplings);
    } catch (const optctrl::NonConvergenceError& e) {
      std::string what = e.what();
      what += "; instruction:";
      for (const Gate& g : gs) what += " " + to_string(g) + ";";
      throw optctrl::NonConvergenceError(what);
    }
  }

  LatencyMode mode_;
  LatencyModel table_;
  std::shared_ptr<optctrl::LatencyOracle> oracle_;
};

struct StageStats {
  std::string stage;
  std::size_t nodes = 0;
  double depth_ns = 0.0;
};

struct ScheduledInstruction {
  CompiledInstruction ins;
  double start_ns = 0.0;
};

struct CompileResult {
  Strategy strategy = Strategy::Isa;
  std::string selected;  ///< strategy whose program was kept
  Circuit source;
  Topology topology;
  int max_width = 4;
  std::vector<StageStats> stages;
  RoutedProgram routed;
  Gdg final_gdg{0};
  Schedule schedule;
  std::vector<ScheduledInstruction> program;
  std::optional<VerificationReport> verification;
  nlohmann::json trace = nlohmann::json::array();
  double native_makespan_ns = 0.0;  ///< before comparing with the extended strategies
  double makespan_ns = 0.0;
  std::optional<double> baseline_makespan_ns;

  double speedup() const { return baseline_makespan_ns ? *baseline_makespan_ns / makespan_ns : 1.0; }

  std::vector<CompiledInstruction> instructions() const {
    std::vector<CompiledInstruction> out;
    for (const auto& s : program) out.push_back(s.ins);
    return out;
  }
};

namespace detail {

inline void prefetch(const LatencyModel& lat, const std::vector<std::vector<Gate>>& parts, int threads) {
  if (lat.mode() != LatencyMode::Oracle) return;
  std::vector<std::vector<Gate>> distinct;
  std::set<std::pair<std::uint64_t, std::vector<Qubit>>> seen;
  for (const auto& gs : parts) {
    const auto qs = support(gs);
    if (seen.insert({phase_fingerprint(sequence_unitary(gs, qs)), qs}).second) distinct.push_back(gs);
  }
  parallel_for(distinct.size(), threads, [&](std::size_t i) { lat.part(Part{distinct[i]}); });
}

inline std::vector<std::vector<Gate>> all_parts(const Gdg& g) {
  std::vector<std::vector<Gate>> out;
  for (NodeId id : g.node_ids()) {
    for (const Part& p : g.node(id).parts) out.push_back(p.gates);
  }
  return out;
}

inline double depth(const Gdg& g) { return g.size() == 0 ? 0.0 : critical_path(g).total_ns; }

inline CompileResult compile_native(const Circuit& c, Strategy strategy, const CompileOptions& opt,
                                    const LatencyContext& ctx) {
  CompileResult r;
  r.strategy = strategy;
  r.selected = to_string(strategy);
  r.source = c;
  r.topology = opt.topology ? *opt.topology : Topology::for_qubits(c.num_qubits);
  r.max_width = opt.max_width;
  if (r.topology.size() < c.num_qubits) {
    throw RoutingError("topology " + r.topology.to_string() + " has fewer sites than the circuit's " +
                       std::to_string(c.num_qubits) + " qubits");
  }

  const LatencyModel logical = ctx.logical();
  const LatencyModel physical = ctx.physical(r.topology);

  Gdg g = build_gdg(c);
  prefetch(logical, all_parts(g), opt.threads);
  assign_durations(g, logical);
  r.stages.push_back({"input", g.size(), depth(g)});
  if (uses_cls(strategy)) {
    detect_diagonal_blocks(g);
    assign_durations(g, logical);
    r.stages.push_back({"diagonal_blocks", g.size(), depth(g)});
  }
  const CommutationGroups groups = uses_cls(strategy) ? build_commutation_groups(g) : singleton_groups(g);
  const Schedule logical_schedule =
      uses_cls(strategy) ? cls_schedule(g, groups, cached_duration) : list_schedule(g, cached_duration);

  const Mapping m = initial_mapping(build_interaction_graph(c), r.topology, opt.seed);
  r.routed = route_swaps(g, logical_schedule, m, r.topology);
  Gdg routed = r.routed.gdg;
  prefetch(physical, all_parts(routed), opt.threads);
  assign_durations(routed, physical);
  r.stages.push_back({"routed", routed.size(), depth(routed)});

  if (uses_agg(strategy)) {
    AggregateOptions ao;
    ao.max_width = opt.max_width;
    ao.use_commutation = uses_cls(strategy);
    ao.threads = opt.threads;
    ao.estimate = ctx.estimate(r.topology);
    AggregateResult agg = aggregate_loop(routed, physical, ao);
    r.trace = std::move(agg.trace);
    routed = std::move(agg.gdg);
    r.stages.push_back({"aggregated", routed.size(), depth(routed)});
  }

  r.final_gdg = routed;
  const CommutationGroups final_groups =
      uses_cls(strategy) ? build_commutation_groups(r.final_gdg) : singleton_groups(r.final_gdg);
  r.schedule = uses_cls(strategy) ? cls_schedule(r.final_gdg, final_groups, cached_duration)
                                  : list_schedule(r.final_gdg, cached_duration);
  r.makespan_ns = r.native_makespan_ns = r.schedule.makespan_ns;
  r.stages.push_back({"final", r.final_gdg.size(), depth(r.final_gdg)});

  // Pulse program: every part of every node, in schedule order.
  std::vector<std::pair<const ScheduleEntry*, const Part*>> parts;
  for (const auto& e : r.schedule.entries) {
    for (const Part& p : r.final_gdg.node(e.node).parts) parts.emplace_back(&e, &p);
  }
  std::vector<std::shared_ptr<const optctrl::PulseRecord>> pulses(parts.size());
  if (ctx.mode() == LatencyMode::Oracle) {
    parallel_for(parts.size(), opt.threads, [&](std::size_t i) {
      pulses[i] = ctx.pulse(parts[i].second->gates, support(parts[i].second->gates), r.topology);
    });
  }
  std::map<NodeId, double> offset;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& [e, p] = parts[i];
    ScheduledInstruction si;
    si.ins.index = static_cast<int>(i);
    si.ins.node = e->node;
    si.ins.gates = p->gates;
    si.ins.qubits = support(p->gates);
    si.ins.pulse = pulses[i];
    si.ins.duration_ns = pulses[i] ? pulses[i]->result.duration_ns : physical.part(*p);
    si.start_ns = e->start_ns + offset[e->node];
    offset[e->node] += si.ins.duration_ns;
    r.program.push_back(std::move(si));
  }
  return r;
}

inline void verify_result(CompileResult& r, const CompileOptions& opt) {
  if (r.program.empty() || !r.program.front().ins.pulse) return;
  r.verification = sample_verify(r.instructions(), opt.verify_samples, opt.seed,
                                 opt.min_time.optimizer.fidelity_threshold);
}

inline CompileResult compile_best(const Circuit& c, Strategy s, const CompileOptions& opt, const LatencyContext& ctx) {
  CompileResult best = compile_native(c, s, opt, ctx);
  std::vector<Strategy> extends;
  if (s == Strategy::Cls || s == Strategy::Agg) extends = {Strategy::Isa};
  if (s == Strategy::ClsAgg) extends = {Strategy::Cls, Strategy::Agg};
  for (Strategy e : extends) {
    CompileResult other = compile_best(c, e, opt, ctx);
    if (other.makespan_ns + detail::kTimeEps < best.makespan_ns) {
      const double native = best.native_makespan_ns;
      best = std::move(other);
      best.strategy = s;
      best.native_makespan_ns = native;
    }
  }
  return best;
}

}  // namespace detail

/// Compiles `c` under `opt`. Stage failures surface as RoutingError,
/// optctrl::NonConvergenceError or DeadlockError; a failed verification is
/// reported in the result, not thrown.
inline CompileResult compile(const Circuit& c, const CompileOptions& opt, const LatencyContext& ctx) {
  if (opt.max_width < 2) throw Error("max width must be at least 2");
  CompileResult r = detail::compile_best(c, opt.strategy, opt, ctx);
  if (opt.compare_baseline) {
    r.baseline_makespan_ns = opt.strategy == Strategy::Isa
                                 ? r.makespan_ns
                                 : detail::compile_best(c, Strategy::Isa, opt, ctx).makespan_ns;
  }
  detail::verify_result(r, opt);
  return r;
}

inline CompileResult compile(const Circuit& c, const CompileOptions& opt) {
  LatencyContext ctx(opt);
  return compile(c, opt, ctx);
}

// ---------------------------------------------------------------------------
// Artifacts

inline std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline nlohmann::json schedule_json(const CompileResult& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : r.schedule.entries) {
    const GdgNode& n = r.final_gdg.node(e.node);
    std::vector<std::string> gs;
    for (const Gate& g : n.gates) gs.push_back(to_string(g));
    j.push_back({{"node", e.node}, {"qubits", e.qubits}, {"start_ns", e.start_ns}, {"duration_ns", e.duration_ns},
                 {"parts", n.parts.size()}, {"gates", gs}});
  }
  return j;
}

inline nlohmann::json pulses_json(const CompileResult& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : r.program) {
    if (!s.ins.pulse) continue;
    nlohmann::json p = optctrl::pulses_to_json(s.ins.pulse->result.pulses, s.ins.pulse->model, s.ins.qubits);
    p["instruction"] = s.ins.index;
    p["fidelity"] = s.ins.pulse->result.fidelity;
    j.push_back(std::move(p));
  }
  return j;
}

inline nlohmann::json manifest_json(const CompileResult& r, const std::string& input_bytes,
                                    const CompileOptions& opt) {
  nlohmann::json j;
  j["input_digest"] = digest_hex(input_bytes);
  j["strategy"] = to_string(r.strategy);
  j["selected"] = r.selected;
  j["topology"] = r.topology.to_string();
  j["max_width"] = r.max_width;
  j["latency"] = opt.latency == LatencyMode::Table ? "table" : "oracle";
  j["seed"] = opt.seed;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : r.stages) j["stages"].push_back({{"stage", s.stage}, {"nodes", s.nodes}, {"depth_ns", s.depth_ns}});
  j["schedule"] = schedule_json(r);
  j["instructions"] = nlohmann::json::array();
  for (const auto& s : r.program) {
    std::vector<std::string> gs;
    for (const Gate& g : s.ins.gates) gs.push_back(to_string(g));
    nlohmann::json ins = {{"index", s.ins.index}, {"node", s.ins.node},        {"qubits", s.ins.qubits},
                          {"gates", gs},          {"start_ns", s.start_ns}, {"duration_ns", s.ins.duration_ns}};
    if (s.ins.pulse) ins["pulse_file"] = "pulses.json";
    j["instructions"].push_back(std::move(ins));
  }
  auto mapping = [](const Mapping& m) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t q = 0; q < m.phys_of.size(); ++q) o["q" + std::to_string(q)] = m.phys_of[q];
    return o;
  };
  j["initial_mapping"] = mapping(r.routed.initial);
  j["final_permutation"] = mapping(r.routed.final);
  j["swap_count"] = r.routed.swap_count;
  j["native_makespan_ns"] = r.native_makespan_ns;
  j["final_makespan_ns"] = r.makespan_ns;
  if (r.baseline_makespan_ns) {
    j["baseline_makespan_ns"] = *r.baseline_makespan_ns;
    j["speedup"] = r.speedup();
  }
  if (r.verification) j["verification"] = r.verification->to_json();
  return j;
}

inline std::string summary_text(const CompileResult& r) {
  std::ostringstream os;
  os << "strategy " << to_string(r.strategy);
  if (r.selected != to_string(r.strategy)) os << " (kept " << r.selected << " program)";
  os << " on " << r.topology.to_string() << ", q_L " << r.max_width << "\n";
  for (const auto& s : r.stages) os << "  " << std::left << std::setw(16) << s.stage << s.nodes << " nodes, depth " << s.depth_ns << " ns\n";
  os << "swaps " << r.routed.swap_count << ", instructions " << r.program.size() << "\n";
  os << "makespan " << r.makespan_ns << " ns";
  if (r.baseline_makespan_ns) os << ", baseline " << *r.baseline_makespan_ns << " ns, speedup " << r.speedup() << "x";
  os << "\n" << render_timeline(r.schedule, r.topology.size(), std::max(1.0, r.makespan_ns / 60.0));
  if (r.verification) os << r.verification->to_text();
  return os.str();
}

/// Writes manifest.json, schedule.json, pulses.json, trace.json and
/// summary.txt into `dir`.
inline void write_artifacts(const CompileResult& r, const std::string& input_bytes, const CompileOptions& opt,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << text;
  };
  put("manifest.json", manifest_json(r, input_bytes, opt).dump(2) + "\n");
  put("schedule.json", schedule_json(r).dump(2) + "\n");
  put("pulses.json", pulses_json(r).dump() + "\n");
  put("trace.json", r.trace.dump(2) + "\n");
  put("summary.txt", summary_text(r));
}

}  // namespace qagg
