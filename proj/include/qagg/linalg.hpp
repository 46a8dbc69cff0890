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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qagg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Largest dense register the library will materialize (2^12 x 2^12).
inline constexpr int kMaxDenseQubits = 12;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |U^dagger U - I|.
inline double unitarity_error(const Matrix& u) {
  return max_abs(u.adjoint() * u - identity(static_cast<int>(u.rows())));
}

inline bool is_unitary(const Matrix& u, double tol = 1e-10) {
  return u.rows() == u.cols() && unitarity_error(u) <= tol;
}

inline bool is_hermitian(const Matrix& h, double tol = 1e-12) {
  return h.rows() == h.cols() && max_abs(h - h.adjoint()) <= tol;
}

/// Kronecker product a (x) b, with a on the more significant index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Distance between u and v modulo a global phase: min over phi of
/// max|u - e^{i phi} v|, with phi taken from the trace overlap.
inline double phase_distance(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw Error("phase_distance: dimension mismatch");
  }
  const Complex overlap = (v.adjoint() * u).trace();
  const Complex phase = std::abs(overlap) > 1e-300 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  return max_abs(u - phase * v);
}

inline bool equal_up_to_phase(const Matrix& u, const Matrix& v, double tol) {
  return phase_distance(u, v) <= tol;
}

/// Hash of a matrix after removing its global phase and rounding entries to
/// `resolution`. Matrices equal up to phase (within rounding) share a key.
inline std::uint64_t phase_fingerprint(const Matrix& u, double resolution = 1e-6) {
  Complex phase{1.0, 0.0};
  const double peak = max_abs(u);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Complex z = u.data()[i];
    if (std::abs(z) >= 0.5 * peak && std::abs(z) > 0.0) {
      phase = std::conj(z) / std::abs(z);
      break;
    }
  }
  std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(u.rows());
  auto mix = [&h](std::int64_t v) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const Complex z = phase * u(r, c);
      mix(std::llround(z.real() / resolution));
      mix(std::llround(z.imag() / resolution));
    }
  }
  return h;
}

}  // namespace qagg
