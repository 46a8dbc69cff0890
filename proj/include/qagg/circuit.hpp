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
 * @file circuit.hpp
 * @brief Gate library and circuit data model.
 *
 * State indexing convention: in any ordered qubit list (a gate's operands, a
 * context passed to embed(), or a whole circuit) the first qubit is the most
 * significant bit of the basis-state index. So for CNOT(q0 -> q1) the basis
 * state |10> has index 2 and maps to |11> (index 3).
 *
 * Rotations follow R_a(theta) = exp(-i theta sigma_a / 2).
 */

#pragma once

#include "qagg/linalg.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qagg {

using Qubit = int;

enum class GateKind {
  H, X, Y, Z, Rx, Ry, Rz, CNOT, CPhase, SWAP, iSWAP, SqrtSWAP, XX, ID, Custom
};

/// Lowercase assembly mnemonic of a gate kind.
inline std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::Rx: return "rx";
    case GateKind::Ry: return "ry";
    case GateKind::Rz: return "rz";
    case GateKind::CNOT: return "cnot";
    case GateKind::CPhase: return "cphase";
    case GateKind::SWAP: return "swap";
    case GateKind::iSWAP: return "iswap";
    case GateKind::SqrtSWAP: return "sqrtswap";
    case GateKind::XX: return "xx";
    case GateKind::ID: return "id";
    case GateKind::Custom: return "custom";
  }
  return "?";
}

inline std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  static constexpr GateKind kAll[] = {
      GateKind::H,     GateKind::X,      GateKind::Y,    GateKind::Z,        GateKind::Rx,
      GateKind::Ry,    GateKind::Rz,     GateKind::CNOT, GateKind::CPhase,   GateKind::SWAP,
      GateKind::iSWAP, GateKind::SqrtSWAP, GateKind::XX, GateKind::ID};
  for (GateKind k : kAll) {
    if (gate_name(k) == name) return k;
  }
  if (name == "cx") return GateKind::CNOT;
  return std::nullopt;
}

/// Number of qubits a named gate acts on; 0 for Custom (size from matrix).
inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CPhase:
    case GateKind::SWAP:
    case GateKind::iSWAP:
    case GateKind::SqrtSWAP:
    case GateKind::XX:
      return 2;
    case GateKind::Custom:
      return 0;
    default:
      return 1;
  }
}

inline int gate_param_count(GateKind k) {
  switch (k) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::CPhase:
    case GateKind::XX:
      return 1;
    default:
      return 0;
  }
}

struct Gate {
  GateKind kind = GateKind::ID;
  std::vector<double> params;
  std::vector<Qubit> qubits;
  std::optional<Matrix> custom_matrix;

  int arity() const { return static_cast<int>(qubits.size()); }
  bool acts_on(Qubit q) const { return std::find(qubits.begin(), qubits.end(), q) != qubits.end(); }

  /// Checks operand count, distinctness, parameter count and (for Custom)
  /// matrix shape and unitarity. Throws Error on violation.
  void validate() const {
    if (qubits.empty()) throw Error("gate has no operands");
    std::vector<Qubit> sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error("gate operands must be distinct");
    }
    if (sorted.front() < 0) throw Error("negative qubit index");
    if (kind == GateKind::Custom) {
      if (!custom_matrix) throw Error("custom gate without matrix");
      const Eigen::Index dim = Eigen::Index{1} << qubits.size();
      if (custom_matrix->rows() != dim || custom_matrix->cols() != dim) {
        throw Error("custom gate matrix does not match operand count");
      }
      if (!is_unitary(*custom_matrix, 1e-8)) throw Error("custom gate matrix is not unitary");
    } else {
      if (custom_matrix) throw Error("named gate must not carry a matrix");
      if (arity() != gate_arity(kind)) {
        throw Error("gate '" + std::string(gate_name(kind)) + "' expects " +
                    std::to_string(gate_arity(kind)) + " qubit(s)");
      }
      if (static_cast<int>(params.size()) != gate_param_count(kind)) {
        throw Error("gate '" + std::string(gate_name(kind)) + "' expects " +
                    std::to_string(gate_param_count(kind)) + " parameter(s)");
      }
    }
  }
};

namespace gates {

inline Gate make(GateKind k, std::vector<Qubit> qs, std::vector<double> ps = {}) {
  Gate g{k, std::move(ps), std::move(qs), std::nullopt};
  g.validate();
  return g;
}
inline Gate h(Qubit q) { return make(GateKind::H, {q}); }
inline Gate x(Qubit q) { return make(GateKind::X, {q}); }
inline Gate y(Qubit q) { return make(GateKind::Y, {q}); }
inline Gate z(Qubit q) { return make(GateKind::Z, {q}); }
inline Gate id(Qubit q) { return make(GateKind::ID, {q}); }
inline Gate rx(double theta, Qubit q) { return make(GateKind::Rx, {q}, {theta}); }
inline Gate ry(double theta, Qubit q) { return make(GateKind::Ry, {q}, {theta}); }
inline Gate rz(double theta, Qubit q) { return make(GateKind::Rz, {q}, {theta}); }
inline Gate cnot(Qubit control, Qubit target) { return make(GateKind::CNOT, {control, target}); }
inline Gate cphase(double phi, Qubit a, Qubit b) { return make(GateKind::CPhase, {a, b}, {phi}); }
inline Gate swap(Qubit a, Qubit b) { return make(GateKind::SWAP, {a, b}); }
inline Gate iswap(Qubit a, Qubit b) { return make(GateKind::iSWAP, {a, b}); }
inline Gate sqrt_swap(Qubit a, Qubit b) { return make(GateKind::SqrtSWAP, {a, b}); }
inline Gate xx(double theta, Qubit a, Qubit b) { return make(GateKind::XX, {a, b}, {theta}); }
inline Gate custom(Matrix m, std::vector<Qubit> qs) {
  Gate g{GateKind::Custom, {}, std::move(qs), std::move(m)};
  g.validate();
  return g;
}

}  // namespace gates

namespace detail {

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix rotation(char axis, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (axis) {
    case 'x': return mat2(c, -kI * s, -kI * s, c);
    case 'y': return mat2(c, -s, s, c);
    default: return mat2(std::exp(-kI * theta / 2.0), 0.0, 0.0, std::exp(kI * theta / 2.0));
  }
}

}  // namespace detail

/// Standard matrix of a gate in its own operand order.
inline Matrix gate_unitary(const Gate& g) {
  using detail::mat2;
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return mat2(r, r, r, -r);
    }
    case GateKind::X: return mat2(0.0, 1.0, 1.0, 0.0);
    case GateKind::Y: return mat2(0.0, -kI, kI, 0.0);
    case GateKind::Z: return mat2(1.0, 0.0, 0.0, -1.0);
    case GateKind::ID: return identity(2);
    case GateKind::Rx: return detail::rotation('x', g.params.at(0));
    case GateKind::Ry: return detail::rotation('y', g.params.at(0));
    case GateKind::Rz: return detail::rotation('z', g.params.at(0));
    case GateKind::CNOT: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return m;
    }
    case GateKind::CPhase: {
      Matrix m = identity(4);
      m(3, 3) = std::exp(kI * g.params.at(0));
      return m;
    }
    case GateKind::SWAP: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
      return m;
    }
    case GateKind::iSWAP: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = m(3, 3) = 1.0;
      m(1, 2) = m(2, 1) = kI;
      return m;
    }
    case GateKind::SqrtSWAP: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = m(3, 3) = 1.0;
      m(1, 1) = m(2, 2) = Complex{0.5, 0.5};
      m(1, 2) = m(2, 1) = Complex{0.5, -0.5};
      return m;
    }
    case GateKind::XX: {
      // exp(-i theta/2 X(x)X)
      const double c = std::cos(g.params.at(0) / 2.0);
      const Complex s = -kI * std::sin(g.params.at(0) / 2.0);
      Matrix m = Matrix::Zero(4, 4);
      for (int i = 0; i < 4; ++i) {
        m(i, i) = c;
        m(i, 3 - i) = s;
      }
      return m;
    }
    case GateKind::Custom: return *g.custom_matrix;
  }
  throw Error("unknown gate kind");
}

/// Gate implementing the adjoint of g.
inline Gate inverse(const Gate& g) {
  switch (g.kind) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::CPhase:
    case GateKind::XX:
      return gates::make(g.kind, g.qubits, {-g.params.at(0)});
    case GateKind::iSWAP:
    case GateKind::SqrtSWAP:
    case GateKind::Custom:
      return gates::custom(gate_unitary(g).adjoint(), g.qubits);
    default:
      return g;  // self-inverse
  }
}

namespace detail {

/// Lifts `op` acting on `positions` (indices into a context of `width` wires,
/// first position most significant) to the full 2^width space.
inline Matrix lift(const Matrix& op, const std::vector<int>& positions, int width) {
  const int k = static_cast<int>(positions.size());
  const Eigen::Index dim = Eigen::Index{1} << width;
  std::vector<Eigen::Index> masks(k);
  Eigen::Index op_mask = 0;
  for (int i = 0; i < k; ++i) {
    masks[i] = Eigen::Index{1} << (width - 1 - positions[i]);
    op_mask |= masks[i];
  }
  auto local_index = [&](Eigen::Index full) {
    Eigen::Index idx = 0;
    for (int i = 0; i < k; ++i) idx = (idx << 1) | ((full & masks[i]) ? 1 : 0);
    return idx;
  };
  auto with_local = [&](Eigen::Index rest, Eigen::Index local) {
    Eigen::Index full = rest;
    for (int i = 0; i < k; ++i) {
      if (local & (Eigen::Index{1} << (k - 1 - i))) full |= masks[i];
    }
    return full;
  };
  Matrix out = Matrix::Zero(dim, dim);
  const Eigen::Index local_dim = Eigen::Index{1} << k;
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Eigen::Index rest = col & ~op_mask;
    const Eigen::Index lc = local_index(col);
    for (Eigen::Index lr = 0; lr < local_dim; ++lr) {
      const Complex v = op(lr, lc);
      if (v != Complex{0.0, 0.0}) out(with_local(rest, lr), col) = v;
    }
  }
  return out;
}

}  // namespace detail

/// g's unitary tensored with identity on the rest of `context`.
/// Wire order follows `context` (first entry most significant).
inline Matrix embed(const Gate& g, const std::vector<Qubit>& context) {
  if (static_cast<int>(context.size()) > kMaxDenseQubits) throw Error("embed: context too wide");
  std::vector<int> positions;
  positions.reserve(g.qubits.size());
  for (Qubit q : g.qubits) {
    auto it = std::find(context.begin(), context.end(), q);
    if (it == context.end()) {
      throw Error("embed: operand q" + std::to_string(q) + " not in context");
    }
    positions.push_back(static_cast<int>(it - context.begin()));
  }
  return detail::lift(gate_unitary(g), positions, static_cast<int>(context.size()));
}

/// Product of the gates (first gate applied first) on the given context.
inline Matrix sequence_unitary(const std::vector<Gate>& gs, const std::vector<Qubit>& context) {
  Matrix u = identity(1 << context.size());
  for (const Gate& g : gs) u = embed(g, context) * u;
  return u;
}

/// Sorted union of operand qubits of a gate list.
inline std::vector<Qubit> support(const std::vector<Gate>& gs) {
  std::vector<Qubit> out;
  for (const Gate& g : gs) out.insert(out.end(), g.qubits.begin(), g.qubits.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;
  std::string name;

  Circuit() = default;
  explicit Circuit(int n, std::string nm = {}) : num_qubits(n), name(std::move(nm)) {
    if (n <= 0) throw Error("circuit needs at least one qubit");
  }

  Circuit& add(Gate g) {
    g.validate();
    for (Qubit q : g.qubits) {
      if (q >= num_qubits) {
        throw Error("qubit index q" + std::to_string(q) + " out of range (circuit has " +
                    std::to_string(num_qubits) + " qubits)");
      }
    }
    gates.push_back(std::move(g));
    return *this;
  }

  void validate() const {
    if (num_qubits <= 0) throw Error("circuit needs at least one qubit");
    for (const Gate& g : gates) {
      g.validate();
      for (Qubit q : g.qubits) {
        if (q >= num_qubits) throw Error("gate operand out of range");
      }
    }
  }

  std::size_t size() const { return gates.size(); }
};

/// Full unitary of a circuit over qubits 0..num_qubits-1.
inline Matrix circuit_unitary(const Circuit& c, int max_qubits = kMaxDenseQubits) {
  if (c.num_qubits > max_qubits) {
    throw Error("circuit_unitary: " + std::to_string(c.num_qubits) +
                " qubits exceed the dense limit of " + std::to_string(max_qubits));
  }
  std::vector<Qubit> ctx(c.num_qubits);
  for (int q = 0; q < c.num_qubits; ++q) ctx[q] = q;
  return sequence_unitary(c.gates, ctx);
}

/// The circuit's gates inverted in reverse order.
inline Circuit inverse(const Circuit& c) {
  Circuit out(c.num_qubits, c.name + "_inv");
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) out.add(inverse(*it));
  return out;
}

/// One-line assembly rendering of a gate, e.g. "rz(5.67) q1".
inline std::string to_string(const Gate& g) {
  std::ostringstream os;
  os.precision(17);
  os << gate_name(g.kind);
  if (!g.params.empty()) {
    os << '(';
    for (std::size_t i = 0; i < g.params.size(); ++i) os << (i ? "," : "") << g.params[i];
    os << ')';
  }
  for (Qubit q : g.qubits) os << " q" << q;
  return os.str();
}

}  // namespace qagg
