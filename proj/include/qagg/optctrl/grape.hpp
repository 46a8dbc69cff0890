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
 * @file grape.hpp
 * @brief Piecewise-constant propagation, fidelity and GRAPE.
 *
 * Each step propagator exp(-i dt H_j) is built from the eigendecomposition
 * of the Hermitian H_j. The same decomposition gives the exact derivative of
 * the step propagator (divided differences of the exponential over the
 * eigenvalues), so gradients match finite differences to rounding.
 */

#pragma once

#include "qagg/optctrl/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace qagg::optctrl {

/// 1 - |Tr(V^dagger U)|^2 / d^2.
inline double infidelity(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw Error("infidelity: dimension mismatch");
  const double d = static_cast<double>(u.rows());
  const double f = std::norm((v.adjoint() * u).trace()) / (d * d);
  return std::clamp(1.0 - f, 0.0, 1.0);
}

namespace detail {

struct Step {
  Eigen::VectorXd lambda;
  Matrix vecs;
  Matrix u;
};

inline Matrix step_hamiltonian(const HamiltonianModel& m, const RealMatrix& a, int j) {
  Matrix h = m.drift;
  for (int k = 0; k < m.num_channels(); ++k) {
    const double c = 2.0 * kPi * a(k, j);
    if (c != 0.0) h.noalias() += c * m.channels[k].op;
  }
  return h;
}

inline Step step(const HamiltonianModel& m, const RealMatrix& a, int j) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(step_hamiltonian(m, a, j));
  Step s;
  s.lambda = es.eigenvalues();
  s.vecs = es.eigenvectors();
  Eigen::VectorXcd ph(s.lambda.size());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(-kI * m.dt_ns * s.lambda(i));
  s.u = s.vecs * ph.asDiagonal() * s.vecs.adjoint();
  return s;
}

inline void check(const ControlPulses& p, const HamiltonianModel& m) {
  if (p.channels() != m.num_channels()) {
    throw Error("pulses have " + std::to_string(p.channels()) + " channels, model has " +
                std::to_string(m.num_channels()));
  }
}

}  // namespace detail

/// U = U_N ... U_1 with U_j = exp(-i dt H_j).
inline Matrix evolve(const ControlPulses& p, const HamiltonianModel& m) {
  detail::check(p, m);
  Matrix u = identity(m.dim());
  for (int j = 0; j < p.steps(); ++j) u = detail::step(m, p.amplitudes, j).u * u;
  return u;
}

struct LossGradient {
  double loss = 1.0;    ///< infidelity
  RealMatrix gradient;  ///< d loss / d u_k(j), GHz^-1
};

/// Infidelity and its exact gradient with respect to every amplitude.
inline LossGradient loss_and_gradient(const ControlPulses& p, const HamiltonianModel& m, const Matrix& target) {
  detail::check(p, m);
  const int n = p.steps(), d = m.dim(), kc = m.num_channels();
  if (target.rows() != d) throw Error("gradient: target dimension mismatch");
  std::vector<detail::Step> steps;
  steps.reserve(n);
  for (int j = 0; j < n; ++j) steps.push_back(detail::step(m, p.amplitudes, j));

  // fwd[j] = U_j ... U_1 (fwd[0] = I); bwd[j] = V^dagger U_N ... U_{j+1}.
  std::vector<Matrix> fwd(n + 1), bwd(n + 1);
  fwd[0] = identity(d);
  for (int j = 1; j <= n; ++j) fwd[j] = steps[j - 1].u * fwd[j - 1];
  bwd[n] = target.adjoint();
  for (int j = n - 1; j >= 0; --j) bwd[j] = bwd[j + 1] * steps[j].u;
  const Complex g = (bwd[n] * fwd[n]).trace();
  const double dd = static_cast<double>(d) * d;

  LossGradient out;
  out.loss = std::clamp(1.0 - std::norm(g) / dd, 0.0, 1.0);
  out.gradient = RealMatrix::Zero(kc, n);
  std::vector<Matrix> op_t(kc);
  for (int k = 0; k < kc; ++k) op_t[k] = m.channels[k].op.transpose();

  Matrix gamma(d, d);
  for (int j = 0; j < n; ++j) {
    const auto& s = steps[j];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const double la = s.lambda(a), lb = s.lambda(b);
        const Complex ea = std::exp(-kI * m.dt_ns * la);
        if (std::abs(la - lb) < 1e-9) {
          gamma(a, b) = -kI * m.dt_ns * ea;
        } else {
          gamma(a, b) = (ea - std::exp(-kI * m.dt_ns * lb)) / (la - lb);
        }
      }
    }
    // d Tr(B_j dU_j F_{j-1}) = Tr(Y dH) with Y = V (W o Gamma^T) V^dagger,
    // W = V^dagger F_{j-1} B_j V.
    const Matrix w = s.vecs.adjoint() * (fwd[j] * bwd[j + 1]) * s.vecs;
    const Matrix y = s.vecs * w.cwiseProduct(gamma.transpose()) * s.vecs.adjoint();
    for (int k = 0; k < kc; ++k) {
      const Complex dg = 2.0 * kPi * y.cwiseProduct(op_t[k]).sum();
      out.gradient(k, j) = -2.0 / dd * (std::conj(g) * dg).real();
    }
  }
  return out;
}

inline RealMatrix gradient(const ControlPulses& p, const HamiltonianModel& m, const Matrix& target) {
  return loss_and_gradient(p, m, target).gradient;
}

struct OptimizerConfig {
  int max_iters = 600;
  double learning_rate = 0.05;       ///< Adam step in the tanh parameters
  double beta1 = 0.9;
  double beta2 = 0.999;
  double fidelity_threshold = 0.999;
  std::uint64_t seed = 1;
  int restarts = 2;                   ///< random starts per duration
  int patience = 150;                 ///< iterations between plateau checks
  double plateau_improvement = 0.02;  ///< min relative loss decrease per check
  double init_fraction = 0.05;        ///< init amplitudes uniform in +-fraction*bound
  double warm_fraction = 0.95;        ///< supplied init is clipped to +-fraction*bound
  double warm_learning_rate = 0.01;   ///< Adam step when starting from supplied init
  double smoothness_weight = 0.0;     ///< quadratic penalty on step differences

  void validate() const {
    if (!(fidelity_threshold > 0.0 && fidelity_threshold <= 1.0)) {
      throw Error("fidelity threshold must lie in (0, 1]");
    }
    if (max_iters < 0 || restarts < 1 || learning_rate <= 0.0 || warm_learning_rate <= 0.0 ||
        !(warm_fraction > 0.0 && warm_fraction < 1.0)) throw Error("invalid optimizer config");
  }
};

struct GrapeResult {
  ControlPulses pulses;
  double fidelity = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// SplitMix64 step, used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Adam descent on x with u = bound * tanh(x), from small random amplitudes
 * (or from `init` for the first start). Stops at the fidelity threshold,
 * after max_iters, or when the loss plateaus. Returns the best pulses seen.
 */
inline GrapeResult grape_optimize(const Matrix& target, const HamiltonianModel& m, int steps,
                                  const OptimizerConfig& cfg, const std::optional<ControlPulses>& init = std::nullopt) {
  cfg.validate();
  if (target.rows() != m.dim() || target.cols() != m.dim()) throw Error("grape: target dimension mismatch");
  if (steps < 0) throw Error("grape: negative step count");
  const int kc = m.num_channels();
  Eigen::VectorXd bound(kc);
  for (int k = 0; k < kc; ++k) bound(k) = m.channels[k].bound;

  GrapeResult best;
  best.pulses = ControlPulses::zeros(m, steps);
  best.fidelity = 1.0 - infidelity(evolve(best.pulses, m), target);
  if (best.fidelity >= cfg.fidelity_threshold) {
    best.converged = true;
    return best;
  }
  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(steps) * 1000 + r));
    std::uniform_real_distribution<double> uni(-cfg.init_fraction, cfg.init_fraction);
    RealMatrix x(kc, steps);
    for (int k = 0; k < kc; ++k) {
      for (int j = 0; j < steps; ++j) {
        double frac = uni(rng);
        if (r == 0 && init) {
          frac = std::clamp(init->amplitudes(k, j) / bound(k), -cfg.warm_fraction, cfg.warm_fraction);
        }
        x(k, j) = std::atanh(frac);
      }
    }
    const double lr = r == 0 && init ? cfg.warm_learning_rate : cfg.learning_rate;
    RealMatrix mom = RealMatrix::Zero(kc, steps), vel = RealMatrix::Zero(kc, steps);
    double checkpoint = 1.0;
    double run_best = 1.0;
    for (int it = 0; it <= cfg.max_iters; ++it) {
      ControlPulses p{RealMatrix(kc, steps), m.dt_ns};
      const RealMatrix th = x.array().tanh().matrix();
      p.amplitudes = bound.asDiagonal() * th;
      LossGradient lg = loss_and_gradient(p, m, target);
      ++best.iterations;
      const double fid = 1.0 - lg.loss;
      run_best = std::min(run_best, lg.loss);
      if (fid > best.fidelity) {
        best.fidelity = fid;
        best.pulses = p;
      }
      if (fid >= cfg.fidelity_threshold) {
        best.converged = true;
        return best;
      }
      if (it == cfg.max_iters) break;
      if (it > 0 && it % cfg.patience == 0) {
        if (run_best > checkpoint * (1.0 - cfg.plateau_improvement)) break;
        checkpoint = run_best;
      }
      if (cfg.smoothness_weight > 0.0 && steps > 1) {
        for (int k = 0; k < kc; ++k) {
          const double s = cfg.smoothness_weight / (bound(k) * bound(k));
          for (int j = 0; j + 1 < steps; ++j) {
            const double diff = p.amplitudes(k, j + 1) - p.amplitudes(k, j);
            lg.gradient(k, j + 1) += 2.0 * s * diff;
            lg.gradient(k, j) -= 2.0 * s * diff;
          }
        }
      }
      // Chain rule through u = b tanh(x).
      const RealMatrix gx =
          (lg.gradient.array() * (bound.asDiagonal() * (1.0 - th.array().square()).matrix()).array()).matrix();
      mom = cfg.beta1 * mom + (1.0 - cfg.beta1) * gx;
      vel = cfg.beta2 * vel + (1.0 - cfg.beta2) * gx.cwiseAbs2();
      const double c1 = 1.0 - std::pow(cfg.beta1, it + 1), c2 = 1.0 - std::pow(cfg.beta2, it + 1);
      x.array() -= lr * (mom.array() / c1) / ((vel.array() / c2).sqrt() + 1e-12);
    }
  }
  return best;
}

}  // namespace qagg::optctrl
