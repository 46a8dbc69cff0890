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

// Matrix-oracle commutation and diagonality checks. There are no algebraic
// shortcuts here: two operators commute iff AB == BA on their joint support.

#pragma once

#include "qagg/circuit.hpp"

#include <algorithm>
#include <vector>

namespace qagg {

inline constexpr double kCommuteTol = 1e-8;
inline constexpr double kDiagonalTol = 1e-8;

struct CommutationVerdict {
  bool commutes = true;
  double residual = 0.0;  ///< max |AB - BA|
};

class WidthError : public Error {
 public:
  using Error::Error;
};

/// Operator given as a gate sequence (a single gate is the one-element case).
struct Operator {
  std::vector<Gate> gates;
  std::vector<Qubit> qubits;  ///< sorted support

  Operator() = default;
  explicit Operator(const Gate& g) : gates{g}, qubits(support(gates)) {}
  explicit Operator(std::vector<Gate> gs) : gates(std::move(gs)), qubits(support(gates)) {}
};

/// Commutation check on the union of supports. Disjoint supports commute
/// without any matrix work. Throws WidthError past `max_width`.
inline CommutationVerdict commutes(const Operator& a, const Operator& b,
                                   int max_width = kMaxDenseQubits, double tol = kCommuteTol) {
  std::vector<Qubit> ctx;
  std::set_union(a.qubits.begin(), a.qubits.end(), b.qubits.begin(), b.qubits.end(),
                 std::back_inserter(ctx));
  if (ctx.size() == a.qubits.size() + b.qubits.size()) return {true, 0.0};
  if (static_cast<int>(ctx.size()) > max_width) {
    throw WidthError("commutes: joint support of " + std::to_string(ctx.size()) +
                     " qubits exceeds limit " + std::to_string(max_width));
  }
  const Matrix ua = sequence_unitary(a.gates, ctx);
  const Matrix ub = sequence_unitary(b.gates, ctx);
  const double r = max_abs(ua * ub - ub * ua);
  return {r <= tol, r};
}

inline CommutationVerdict commutes(const Gate& a, const Gate& b, int max_width = kMaxDenseQubits,
                                   double tol = kCommuteTol) {
  return commutes(Operator(a), Operator(b), max_width, tol);
}

/// True iff every off-diagonal magnitude is <= tol.
inline bool is_diagonal(const Matrix& u, double tol = kDiagonalTol) {
  if (u.rows() != u.cols()) throw Error("is_diagonal: matrix not square");
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      if (r != c && std::abs(u(r, c)) > tol) return false;
    }
  }
  return true;
}

}  // namespace qagg
