#pragma once

#include "iqp/model.hpp"

namespace iqp {

struct RecoveryConfig {
  double zero_eig_tol = 0.01;  // eigenvalues of Q - A^T y at most this
                               // are treated as zero
  double active_tol = 1e-7;    // |y_f| above this marks the dual active
  double psd_tol = 1e-8;       // min eigenvalue of X at least -psd_tol
};

struct RecoveryResult {
  Vector x;            // candidate primal point, length n (X_{0i}/X_{00})
  Matrix x_matrix;     // recovered X in S_{n+1}
  double min_eig_x = 0.0;
  bool psd_ok = false;
  int zero_space_dim = 0;
  int active_facets = 0;
  int active_linear = 0;
  std::vector<int> active_counts;  // active facet duals per variable
  double residual = 0.0;  // least-squares residual of the defining system
};

/// Reconstructs a primal matrix X supported on the (near-)null space of
/// the dual slack matrix, solving <A0, X> = 1 and <A_f, X> = beta_f for
/// all active dual coordinates in a least-squares sense.
RecoveryResult recover_primal(const SdpRelaxation& rel, const Vector& y,
                              const RecoveryConfig& cfg = {});

/// ||(Q - A^T y) X||_max; zero at an exact complementary pair.
double complementarity_residual(const SdpRelaxation& rel, const Vector& y,
                                const Matrix& x);

}  // namespace iqp
