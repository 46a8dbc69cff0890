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
 * @file model.hpp
 * @brief Two-level transmon control model with XY coupling.
 *
 * Units: time in ns, amplitudes in GHz. A step with amplitudes u_k evolves
 * under H = drift + sum_k 2*pi*u_k*H_k.
 *
 * Channels, in order: for each qubit x, y, z drives (operators sigma_x,
 * sigma_y, sigma_z, bound 5*mu_max); then one exchange channel per coupled
 * pair (operator (XX + YY)/2, bound mu_max).
 */

#pragma once

#include "qagg/circuit.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace qagg::optctrl {

struct ModelParams {
  double dt_ns = 0.5;
  double mu_max_ghz = 0.02;
  double single_qubit_factor = 5.0;
};

struct Channel {
  std::string name;           ///< "x", "y", "z" or "xy"
  std::vector<int> qubits;    ///< local qubit indices
  Matrix op;                  ///< Hermitian, full local dimension
  double bound = 0.0;         ///< GHz
};

struct HamiltonianModel {
  int num_qubits = 0;
  double dt_ns = 0.5;
  Matrix drift;
  std::vector<Channel> channels;

  int dim() const { return 1 << num_qubits; }
  int num_channels() const { return static_cast<int>(channels.size()); }

  void validate() const {
    if (dt_ns <= 0.0) throw Error("model: dt must be positive");
    if (drift.rows() != dim() || !is_hermitian(drift)) throw Error("model: drift must be Hermitian");
    for (const Channel& c : channels) {
      if (c.op.rows() != dim() || !is_hermitian(c.op)) throw Error("model: channel '" + c.name + "' not Hermitian");
      if (c.bound <= 0.0) throw Error("model: channel bound must be positive");
    }
  }
};

namespace detail {

inline Matrix pauli(char p) {
  Matrix m(2, 2);
  switch (p) {
    case 'x': m << 0.0, 1.0, 1.0, 0.0; break;
    case 'y': m << 0.0, -kI, kI, 0.0; break;
    case 'z': m << 1.0, 0.0, 0.0, -1.0; break;
    default: m = identity(2);
  }
  return m;
}

/// Tensor product with `ops[i]` on local qubit i (qubit 0 most significant).
inline Matrix tensor(const std::vector<Matrix>& ops) {
  Matrix out = identity(1);
  for (const Matrix& m : ops) out = kron(out, m);
  return out;
}

inline Matrix local_op(int n, std::vector<std::pair<int, char>> factors) {
  std::vector<Matrix> ops(n, identity(2));
  for (auto [q, p] : factors) ops[q] = pauli(p);
  return tensor(ops);
}

}  // namespace detail

/// Model on n local qubits with exchange channels on the given local pairs.
inline HamiltonianModel make_model(int n, const std::vector<std::pair<int, int>>& couplings,
                                   const ModelParams& p = {}) {
  if (n < 1) throw Error("model: need at least one qubit");
  HamiltonianModel m;
  m.num_qubits = n;
  m.dt_ns = p.dt_ns;
  m.drift = Matrix::Zero(m.dim(), m.dim());
  const double b1 = p.single_qubit_factor * p.mu_max_ghz;
  for (int q = 0; q < n; ++q) {
    for (char axis : {'x', 'y', 'z'}) {
      m.channels.push_back({std::string(1, axis), {q}, detail::local_op(n, {{q, axis}}), b1});
    }
  }
  for (auto [a, b] : couplings) {
    if (a == b || a < 0 || b < 0 || a >= n || b >= n) throw Error("model: bad coupling pair");
    const Matrix xy = 0.5 * (detail::local_op(n, {{a, 'x'}, {b, 'x'}}) + detail::local_op(n, {{a, 'y'}, {b, 'y'}}));
    m.channels.push_back({"xy", {std::min(a, b), std::max(a, b)}, xy, p.mu_max_ghz});
  }
  m.validate();
  return m;
}

/// Nearest-neighbour chain coupling 0-1-2-...
inline std::vector<std::pair<int, int>> chain_couplings(int n) {
  std::vector<std::pair<int, int>> out;
  for (int q = 0; q + 1 < n; ++q) out.emplace_back(q, q + 1);
  return out;
}

/// Piecewise-constant amplitudes: row k is channel k, column j is step j.
struct ControlPulses {
  RealMatrix amplitudes;
  double dt_ns = 0.5;

  int channels() const { return static_cast<int>(amplitudes.rows()); }
  int steps() const { return static_cast<int>(amplitudes.cols()); }
  double duration_ns() const { return steps() * dt_ns; }

  static ControlPulses zeros(const HamiltonianModel& m, int steps) {
    return {RealMatrix::Zero(m.num_channels(), steps), m.dt_ns};
  }

  bool within_bounds(const HamiltonianModel& m, double slack = 1e-12) const {
    if (steps() == 0) return true;
    for (int k = 0; k < channels(); ++k) {
      if (amplitudes.row(k).cwiseAbs().maxCoeff() > m.channels[k].bound + slack) return false;
    }
    return true;
  }
};

/// Pulse file: {dt, channels:[{name, qubits, bound}], amplitudes:[[...], ...]}.
/// `qubit_labels` maps local indices to the labels written out.
inline nlohmann::json pulses_to_json(const ControlPulses& p, const HamiltonianModel& m,
                                     const std::vector<int>& qubit_labels = {}) {
  nlohmann::json j;
  j["dt"] = p.dt_ns;
  j["channels"] = nlohmann::json::array();
  j["amplitudes"] = nlohmann::json::array();
  for (int k = 0; k < m.num_channels(); ++k) {
    std::vector<int> qs;
    for (int q : m.channels[k].qubits) qs.push_back(qubit_labels.empty() ? q : qubit_labels.at(q));
    j["channels"].push_back({{"name", m.channels[k].name}, {"qubits", qs}, {"bound", m.channels[k].bound}});
    std::vector<double> row(p.steps());
    for (int s = 0; s < p.steps(); ++s) row[s] = p.amplitudes(k, s);
    j["amplitudes"].push_back(row);
  }
  return j;
}

inline ControlPulses pulses_from_json(const nlohmann::json& j) {
  ControlPulses p;
  p.dt_ns = j.at("dt").get<double>();
  const auto& rows = j.at("amplitudes");
  const int k = static_cast<int>(rows.size());
  const int n = k == 0 ? 0 : static_cast<int>(rows.at(0).size());
  p.amplitudes = RealMatrix::Zero(k, n);
  for (int r = 0; r < k; ++r) {
    if (static_cast<int>(rows[r].size()) != n) throw Error("pulse file: ragged amplitude rows");
    for (int s = 0; s < n; ++s) p.amplitudes(r, s) = rows[r][s].get<double>();
  }
  return p;
}

}  // namespace qagg::optctrl
