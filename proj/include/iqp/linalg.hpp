#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace iqp::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Denominators below this magnitude are treated as singular in the
// Woodbury updates.
inline constexpr double kSingularGuard = 1e-12;

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularUpdate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns match eigenvalue order
};

/// Full symmetric eigendecomposition, eigenvalues ascending.
SpectralDecomposition spectral_decompose(const Matrix& m);

double min_eigenvalue(const Matrix& m);

/// Inverse of a symmetric positive definite matrix via Cholesky.
/// Throws NotPositiveDefinite if the factorization fails.
Matrix dense_inverse(const Matrix& m);

/// Given W = M^{-1}, returns (M - c*v*v^T)^{-1} in O(dim^2).
/// Throws SingularUpdate when |1 - c*v^T W v| falls below the guard.
Matrix woodbury_rank1(const Matrix& w, const Vector& v, double c);

/// Given W = M^{-1}, returns (M - s*E*C)^{-1} with E dim x 2, C 2 x dim.
/// Throws SingularUpdate when the inner 2x2 system is singular.
Matrix woodbury_rank2(const Matrix& w, const Matrix& e, const Matrix& c,
                      double s);

}  // namespace iqp::linalg
