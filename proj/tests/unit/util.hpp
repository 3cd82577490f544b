#pragma once

#include <random>

#include "iqp/dual_solver.hpp"
#include "iqp/instances.hpp"
#include "iqp/linalg.hpp"
#include "iqp/model.hpp"

namespace testutil {

using iqp::Matrix;
using iqp::Vector;

inline Matrix random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  }
  return m;
}

inline Matrix random_spd(std::mt19937_64& rng, int n, double shift = 0.5) {
  const Matrix a = random_symmetric(rng, n);
  return a * a.transpose() + shift * Matrix::Identity(n, n);
}

inline iqp::IqpInstance random_instance(std::mt19937_64& rng, int n,
                                        std::int64_t lo = -1,
                                        std::int64_t hi = 1,
                                        bool with_linear = false) {
  iqp::IqpInstance inst;
  inst.n = n;
  inst.q_hat = random_symmetric(rng, n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  inst.l_hat = Vector(n);
  for (int i = 0; i < n; ++i) inst.l_hat(i) = u(rng);
  inst.c_hat = u(rng);
  inst.domains.assign(n, {lo, hi});
  if (with_linear) {
    iqp::LinearConstraint lc;
    lc.a = Vector(n);
    for (int i = 0; i < n; ++i) lc.a(i) = u(rng);
    lc.rhs = u(rng) + 0.5;
    inst.linear_constraints.push_back(std::move(lc));
  }
  return inst;
}

/// Builds a consistent DualState at a given y (dense inverse, no history).
inline iqp::DualState state_at(const iqp::SdpRelaxation& rel, const Vector& y,
                               double sigma) {
  iqp::DualState st;
  st.y = y;
  st.w = iqp::linalg::dense_inverse(iqp::dual_slack_matrix(rel, y));
  st.sigma = sigma;
  return st;
}

/// Random strictly feasible dual state: starts from the guaranteed interior
/// point and applies random coordinate perturbations, keeping only those
/// that preserve positive definiteness.
inline iqp::DualState random_state(std::mt19937_64& rng,
                                   const iqp::SdpRelaxation& rel, double sigma,
                                   int tweaks = 20) {
  iqp::DualState st = iqp::initial_point(rel, sigma);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector y = st.y;
  for (int t = 0; t < tweaks; ++t) {
    Vector cand = y;
    const int k =
        static_cast<int>(u(rng) * static_cast<double>(rel.dual_dim()));
    const double delta = (u(rng) - 0.5) * 0.6;
    if (k == 0) {
      cand(0) += delta;
    } else {
      cand(k) = std::min(0.0, cand(k) - std::abs(delta));
    }
    const Matrix slack = iqp::dual_slack_matrix(rel, cand);
    if (Eigen::LLT<Matrix>(slack).info() == Eigen::Success &&
        iqp::linalg::min_eigenvalue(slack) > 1e-6) {
      y = cand;
    }
  }
  return state_at(rel, y, sigma);
}

}  // namespace testutil
