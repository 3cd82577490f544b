#include "iqp/linalg.hpp"

namespace iqp::linalg {

SpectralDecomposition spectral_decompose(const Matrix& m) {
  if (!m.allFinite()) {
    throw InvalidInput("spectral_decompose: non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw InvalidInput("spectral_decompose: eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Matrix& m) {
  return spectral_decompose(m).eigenvalues(0);
}

Matrix dense_inverse(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("dense_inverse: Cholesky factorization failed");
  }
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

Matrix woodbury_rank1(const Matrix& w, const Vector& v, double c) {
  if (c == 0.0) return w;
  const Vector wv = w * v;
  const double denom = 1.0 - c * v.dot(wv);
  if (std::abs(denom) < kSingularGuard) {
    throw SingularUpdate("woodbury_rank1: singular denominator");
  }
  Matrix result = w + (c / denom) * (wv * wv.transpose());
  // symmetrize against roundoff drift
  result = 0.5 * (result + result.transpose()).eval();
  return result;
}

Matrix woodbury_rank2(const Matrix& w, const Matrix& e, const Matrix& c,
                      double s) {
  if (s == 0.0) return w;
  const Matrix we = w * e;                       // dim x 2
  const Matrix cw = c * w;                       // 2 x dim
  Eigen::Matrix2d inner =
      Eigen::Matrix2d::Identity() / s - Eigen::Matrix2d(c * we);
  const double det = inner.determinant();
  if (std::abs(det) < kSingularGuard) {
    throw SingularUpdate("woodbury_rank2: singular 2x2 system");
  }
  Eigen::Matrix2d inner_inv;
  inner_inv << inner(1, 1), -inner(0, 1), -inner(1, 0), inner(0, 0);
  inner_inv /= det;
  Matrix result = w + we * inner_inv * cw;
  result = 0.5 * (result + result.transpose()).eval();
  return result;
}

}  // namespace iqp::linalg
