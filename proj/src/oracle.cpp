#include "iqp/oracle.hpp"

namespace iqp::oracle {

std::optional<EnumerationResult> enumerate_optimum(const IqpInstance& inst,
                                                   std::int64_t cap) {
  inst.validate();
  double space = 1.0;
  for (const auto& [l, u] : inst.domains) {
    space *= static_cast<double>(u - l + 1);
    if (space > static_cast<double>(cap)) {
      throw TooLarge("enumeration space exceeds cap");
    }
  }

  std::vector<std::int64_t> x(inst.n);
  for (int i = 0; i < inst.n; ++i) x[i] = inst.domains[i].first;

  std::optional<EnumerationResult> best;
  while (true) {
    if (point_feasible(inst, x)) {
      const double val = objective_value(inst, x);
      if (!best || val < best->value) best = EnumerationResult{val, x};
    }
    // odometer increment
    int i = 0;
    for (; i < inst.n; ++i) {
      if (x[i] < inst.domains[i].second) {
        ++x[i];
        break;
      }
      x[i] = inst.domains[i].first;
    }
    if (i == inst.n) break;
  }
  return best;
}

double dense_barrier_value(const SdpRelaxation& rel, const Vector& y,
                           double sigma) {
  const Matrix m = dual_slack_matrix(rel, y);
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw linalg::NotPositiveDefinite("dense_barrier_value: not PD");
  }
  double logdet = 0.0;
  const Matrix l = llt.matrixL();
  for (int i = 0; i < m.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
  return rel.b().dot(y) + sigma * logdet;
}

Vector dense_barrier_gradient(const SdpRelaxation& rel, const Vector& y,
                              double sigma) {
  const Matrix w = linalg::dense_inverse(dual_slack_matrix(rel, y));
  Vector g = rel.b();
  g(0) -= sigma * w(0, 0);
  for (int f = 0; f < rel.m(); ++f) {
    const Matrix a = dense_facet_matrix(rel, rel.facets[f]);
    g(1 + f) -= sigma * (a.array() * w.array()).sum();
  }
  for (int k = 0; k < rel.p(); ++k) {
    const Matrix a = dense_linear_matrix(rel, rel.linear[k]);
    g(1 + rel.m() + k) -= sigma * (a.array() * w.array()).sum();
  }
  return g;
}

}  // namespace iqp::oracle
