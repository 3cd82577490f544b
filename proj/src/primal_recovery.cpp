#include "iqp/primal_recovery.hpp"

#include <cmath>

namespace iqp {

namespace {

// Index of (i,j), i <= j, in the packed upper triangle of a k x k matrix.
int packed_index(int i, int j, int k) {
  return i * k - i * (i - 1) / 2 + (j - i);
}

// Writes <M, Y> as a row over the packed upper triangle of Y, where
// M = sum of weighted symmetric outer products passed in as (vec, vec, w)
// terms meaning w * (u v^T + v u^T) / (u == v ? 2 : 1). To keep it simple
// we accumulate the dense k x k matrix first; k is tiny.
void emit_row(Matrix& a, int r, const Matrix& m) {
  const int k = static_cast<int>(m.rows());
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      a(r, packed_index(i, j, k)) = (i == j) ? m(i, i) : 2.0 * m(i, j);
    }
  }
}

}  // namespace

RecoveryResult recover_primal(const SdpRelaxation& rel, const Vector& y,
                              const RecoveryConfig& cfg) {
  const int dim = rel.dim;
  const Matrix slack = dual_slack_matrix(rel, y);
  const auto dec = linalg::spectral_decompose(slack);

  int k = 0;
  while (k < dim && dec.eigenvalues(k) <= cfg.zero_eig_tol) ++k;
  if (k == 0) k = 1;  // the smallest eigenvector always participates
  const Matrix p0 = dec.eigenvectors.leftCols(k);
  const Eigen::RowVectorXd row0 = p0.row(0);

  std::vector<Matrix> lhs_terms;
  std::vector<double> rhs_vals;
  lhs_terms.push_back(row0.transpose() * row0);  // <A0, X> = 1
  rhs_vals.push_back(1.0);

  int active_facets = 0;
  std::vector<int> active_counts(rel.n(), 0);
  for (int f = 0; f < rel.m(); ++f) {
    if (std::abs(y(1 + f)) <= cfg.active_tol) continue;
    ++active_facets;
    ++active_counts[rel.facets[f].var - 1];
    const auto& fd = rel.facets[f];
    const Eigen::RowVectorXd rowi = p0.row(fd.var);
    Matrix m = fd.a00 * (row0.transpose() * row0) +
               fd.a0i * (row0.transpose() * rowi + rowi.transpose() * row0) +
               fd.aii * (rowi.transpose() * rowi);
    lhs_terms.push_back(std::move(m));
    rhs_vals.push_back(fd.beta);
  }
  int active_linear = 0;
  for (int j = 0; j < rel.p(); ++j) {
    if (std::abs(y(1 + rel.m() + j)) <= cfg.active_tol) continue;
    ++active_linear;
    const auto& lc = rel.linear[j];
    const Eigen::RowVectorXd q =
        (p0.transpose() * lc.row0_halved(dim)).transpose();
    Matrix m = row0.transpose() * q + q.transpose() * row0;
    lhs_terms.push_back(std::move(m));
    rhs_vals.push_back(lc.beta);
  }

  const int unknowns = k * (k + 1) / 2;
  const int rows = static_cast<int>(lhs_terms.size());
  Matrix a(rows, unknowns);
  Vector rhs(rows);
  for (int r = 0; r < rows; ++r) {
    emit_row(a, r, lhs_terms[r]);
    rhs(r) = rhs_vals[r];
  }

  const Vector z =
      a.completeOrthogonalDecomposition().solve(rhs);

  Matrix ymat(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      ymat(i, j) = ymat(j, i) = z(packed_index(i, j, k));
    }
  }

  RecoveryResult res;
  res.zero_space_dim = k;
  res.active_facets = active_facets;
  res.active_linear = active_linear;
  res.active_counts = std::move(active_counts);
  res.residual = (a * z - rhs).norm();
  res.x_matrix = p0 * ymat * p0.transpose();
  res.x_matrix = 0.5 * (res.x_matrix + res.x_matrix.transpose()).eval();
  res.min_eig_x = linalg::min_eigenvalue(res.x_matrix);
  res.psd_ok = res.min_eig_x >= -cfg.psd_tol;
  res.x = Vector::Zero(rel.n());
  const double x00 = res.x_matrix(0, 0);
  if (std::abs(x00) > 1e-12) {
    for (int i = 1; i <= rel.n(); ++i) res.x(i - 1) = res.x_matrix(0, i) / x00;
  }
  return res;
}

double complementarity_residual(const SdpRelaxation& rel, const Vector& y,
                                const Matrix& x) {
  return (dual_slack_matrix(rel, y) * x).cwiseAbs().maxCoeff();
}

}  // namespace iqp
