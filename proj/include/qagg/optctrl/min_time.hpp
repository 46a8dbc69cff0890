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

#include "qagg/optctrl/grape.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace qagg::optctrl {

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

struct MinTimeConfig {
  OptimizerConfig optimizer;
  int resolution_steps = 4;   ///< search grid, in dt units
  double cap_ns = 2000.0;     ///< give up past this duration
};

struct MinTimeResult {
  int steps = 0;
  double duration_ns = 0.0;
  ControlPulses pulses;
  double fidelity = 1.0;
  int probes = 0;
};

/**
 * Shortest duration on the resolution grid at which GRAPE reaches the
 * threshold. The upper bound doubles from one grid unit (or starts at
 * `hint_steps`) until a probe succeeds; bisection then closes the gap.
 * Each probe is seeded from (seed, steps), so a probe's outcome never
 * depends on the search path.
 */
inline MinTimeResult min_time(const Matrix& target, const HamiltonianModel& m, const MinTimeConfig& cfg,
                              std::optional<int> hint_steps = std::nullopt) {
  cfg.optimizer.validate();
  const double thr = cfg.optimizer.fidelity_threshold;
  MinTimeResult out;
  out.pulses = ControlPulses::zeros(m, 0);
  out.fidelity = 1.0 - infidelity(identity(m.dim()), target);
  if (out.fidelity >= thr) return out;

  const int unit = cfg.resolution_steps;
  std::map<int, GrapeResult> probes;  // grid units -> result
  double best_seen = 0.0;
  auto probe = [&](int units) -> bool {
    auto it = probes.find(units);
    if (it == probes.end()) {
      it = probes.emplace(units, grape_optimize(target, m, units * unit, cfg.optimizer)).first;
      ++out.probes;
      best_seen = std::max(best_seen, it->second.fidelity);
    }
    return it->second.converged;
  };

  const int cap_units = std::max(1, static_cast<int>(cfg.cap_ns / (m.dt_ns * unit)));
  int lo = 0, hi = 1;  // lo fails (0 units is the identity), hi to be found
  if (hint_steps && *hint_steps > 0) hi = std::min(cap_units, (*hint_steps + unit - 1) / unit);
  while (!probe(hi)) {
    lo = hi;
    if (hi >= cap_units) {
      std::ostringstream os;
      os << "min_time: no pulse reached fidelity " << thr << " within " << cfg.cap_ns
         << " ns (best " << best_seen << ")";
      throw NonConvergenceError(os.str());
    }
    hi = std::min(cap_units, hi * 2);
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (probe(mid) ? hi : lo) = mid;
  }
  const GrapeResult& r = probes.at(hi);
  out.steps = hi * unit;
  out.duration_ns = out.steps * m.dt_ns;
  out.pulses = r.pulses;
  out.fidelity = r.fidelity;
  return out;
}

namespace detail {

/// Pulses stretched or squeezed to `steps`, keeping each channel's area
/// where the bound allows.
inline ControlPulses resample(const ControlPulses& p, int steps, const HamiltonianModel& m) {
  ControlPulses out = ControlPulses::zeros(m, steps);
  if (p.steps() == 0) return out;
  const double scale = static_cast<double>(p.steps()) / steps;
  for (int k = 0; k < m.num_channels(); ++k) {
    const double b = 0.999 * m.channels[k].bound;
    for (int j = 0; j < steps; ++j) {
      const int src = std::min(p.steps() - 1, static_cast<int>(j * scale));
      out.amplitudes(k, j) = std::clamp(p.amplitudes(k, src) * scale, -b, b);
    }
  }
  return out;
}

}  // namespace detail

/**
 * Shortest grid duration not longer than `warm` (rounded up to the grid) that
 * reaches the threshold. The first probe polishes `warm`; each later probe
 * starts from the shortest success so far, resampled. Empty when even the
 * first probe fails.
 */
inline std::optional<MinTimeResult> min_time_within(const Matrix& target, const HamiltonianModel& m,
                                                    const MinTimeConfig& cfg, const ControlPulses& warm) {
  cfg.optimizer.validate();
  const int unit = cfg.resolution_steps;
  MinTimeResult out;
  out.pulses = ControlPulses::zeros(m, 0);
  out.fidelity = 1.0 - infidelity(identity(m.dim()), target);
  if (out.fidelity >= cfg.optimizer.fidelity_threshold) return out;

  OptimizerConfig oc = cfg.optimizer;
  oc.restarts = 1;
  int hi = std::max(1, (warm.steps() + unit - 1) / unit);
  ControlPulses init = ControlPulses::zeros(m, hi * unit);
  init.amplitudes.leftCols(warm.steps()) = warm.amplitudes;
  GrapeResult best = grape_optimize(target, m, hi * unit, oc, init);
  ++out.probes;
  if (!best.converged) return std::nullopt;
  int lo = 0;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    GrapeResult r = grape_optimize(target, m, mid * unit, oc, detail::resample(best.pulses, mid * unit, m));
    ++out.probes;
    if (r.converged) {
      hi = mid;
      best = std::move(r);
    } else {
      lo = mid;
    }
  }
  out.steps = hi * unit;
  out.duration_ns = out.steps * m.dt_ns;
  out.pulses = best.pulses;
  out.fidelity = best.fidelity;
  return out;
}

/// Local coupling pairs among sorted physical qubits under an adjacency test.
inline std::vector<std::pair<int, int>> local_couplings(const std::vector<Qubit>& qubits,
                                                        const std::function<bool(Qubit, Qubit)>& adjacent) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < static_cast<int>(qubits.size()); ++a) {
    for (int b = a + 1; b < static_cast<int>(qubits.size()); ++b) {
      if (adjacent(qubits[a], qubits[b])) out.emplace_back(a, b);
    }
  }
  return out;
}

/// Synthesized instruction as stored in the oracle cache.
struct PulseRecord {
  HamiltonianModel model;
  MinTimeResult result;
};

/**
 * Per-instruction minimum-time synthesis with a cache keyed by the target's
 * phase-free fingerprint and the coupling pattern. Safe to query from
 * several threads; the first finished result for a key wins.
 */
class LatencyOracle {
 public:
  using Adjacency = std::function<bool(Qubit, Qubit)>;

  LatencyOracle(ModelParams params, MinTimeConfig cfg, Adjacency adjacent = chain_adjacency())
      : params_(params), cfg_(cfg), adjacent_(std::move(adjacent)) {}

  static Adjacency chain_adjacency() {
    return [](Qubit a, Qubit b) { return std::abs(a - b) == 1; };
  }

  const ModelParams& params() const { return params_; }
  const MinTimeConfig& config() const { return cfg_; }
  void set_adjacency(Adjacency adj) { adjacent_ = std::move(adj); }

  /// Unitary of `gates` on the sorted qubit list (first most significant).
  static Matrix target(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits) {
    return sequence_unitary(gates, qubits);
  }

  std::shared_ptr<const PulseRecord> query(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits,
                                           std::optional<int> hint_steps = std::nullopt) {
    return query(gates, qubits, local_couplings(qubits, adjacent_), hint_steps);
  }

  /// As above with the local coupling pairs given explicitly.
  std::shared_ptr<const PulseRecord> query(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits,
                                           const std::vector<std::pair<int, int>>& couplings,
                                           std::optional<int> hint_steps = std::nullopt) {
    const Matrix u = target(gates, qubits);
    const Key key{phase_fingerprint(u), static_cast<int>(qubits.size()), couplings};
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto rec = std::make_shared<PulseRecord>();
    rec->model = make_model(static_cast<int>(qubits.size()), couplings, params_);
    rec->result = min_time(u, rec->model, cfg_, hint_steps);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(rec)).first->second;
  }

  /// Cached record if present; never runs the optimizer.
  std::shared_ptr<const PulseRecord> peek(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits) const {
    return peek(gates, qubits, local_couplings(qubits, adjacent_));
  }
  std::shared_ptr<const PulseRecord> peek(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits,
                                          const std::vector<std::pair<int, int>>& couplings) const {
    const Key key{phase_fingerprint(target(gates, qubits)), static_cast<int>(qubits.size()), couplings};
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    return it == cache_.end() ? nullptr : it->second;
  }

  using CouplingFn = std::function<std::vector<std::pair<int, int>>(const std::vector<Qubit>&)>;

  /**
   * One pulse for the whole part sequence, searched no longer than the
   * parts' own pulses back to back (which seed the search). Null when no
   * such pulse is found; the outcome is cached either way.
   */
  std::shared_ptr<const PulseRecord> query_fused(const std::vector<std::vector<Gate>>& parts,
                                                 const CouplingFn& couplings) {
    std::vector<Gate> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    const std::vector<Qubit> qs = support(all);
    const auto cpl = couplings(qs);
    const Matrix u = target(all, qs);
    const Key key{phase_fingerprint(u), static_cast<int>(qs.size()), cpl};
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
      if (unreachable_.count(key)) return nullptr;
    }
    auto rec = std::make_shared<PulseRecord>();
    rec->model = make_model(static_cast<int>(qs.size()), cpl, params_);
    const ControlPulses warm = concatenate(parts, qs, rec->model, couplings);
    auto r = min_time_within(u, rec->model, cfg_, warm);
    std::lock_guard<std::mutex> lock(mu_);
    if (!r) {
      unreachable_.insert(key);
      return nullptr;
    }
    rec->result = std::move(*r);
    return cache_.emplace(key, std::move(rec)).first->second;
  }

  double duration(const std::vector<Gate>& gates, const std::vector<Qubit>& qubits) {
    return query(gates, qubits)->result.duration_ns;
  }

  std::size_t cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
  }

  /// Each part's own pulses, embedded in the wider model, back to back.
  ControlPulses concatenate(const std::vector<std::vector<Gate>>& parts, const std::vector<Qubit>& qs,
                            const HamiltonianModel& full, const CouplingFn& couplings) {
    auto local = [&](Qubit q) {
      return static_cast<int>(std::lower_bound(qs.begin(), qs.end(), q) - qs.begin());
    };
    std::vector<RealMatrix> blocks;
    int total = 0;
    for (const auto& p : parts) {
      const std::vector<Qubit> ps = support(p);
      auto sub = query(p, ps, couplings(ps));
      const ControlPulses& sp = sub->result.pulses;
      RealMatrix block = RealMatrix::Zero(full.num_channels(), sp.steps());
      for (int k = 0; k < sub->model.num_channels(); ++k) {
        const Channel& c = sub->model.channels[k];
        std::vector<int> target_qubits;
        for (int lq : c.qubits) target_qubits.push_back(local(ps[lq]));
        int row = -1;
        for (int f = 0; f < full.num_channels() && row < 0; ++f) {
          if (full.channels[f].name == c.name && full.channels[f].qubits == target_qubits) row = f;
        }
        if (row < 0) throw Error("oracle: part channel '" + c.name + "' missing from the fused model");
        block.row(row) = sp.amplitudes.row(k);
      }
      total += sp.steps();
      blocks.push_back(std::move(block));
    }
    ControlPulses out = ControlPulses::zeros(full, total);
    int at = 0;
    for (const auto& b : blocks) {
      out.amplitudes.middleCols(at, b.cols()) = b;
      at += static_cast<int>(b.cols());
    }
    return out;
  }

 private:
  using Key = std::tuple<std::uint64_t, int, std::vector<std::pair<int, int>>>;


  ModelParams params_;
  MinTimeConfig cfg_;
  Adjacency adjacent_;
  mutable std::mutex mu_;
  std::map<Key, std::shared_ptr<const PulseRecord>> cache_;
  std::set<Key> unreachable_;
};

}  // namespace qagg::optctrl
