#include "iqp/model.hpp"

#include <cmath>

namespace iqp {

void IqpInstance::validate() const {
  if (n < 1) throw InvalidInstance("instance needs at least one variable");
  if (q_hat.rows() != n || q_hat.cols() != n)
    throw InvalidInstance("q_hat dimension mismatch");
  if (l_hat.size() != n) throw InvalidInstance("l_hat dimension mismatch");
  if (!q_hat.allFinite() || !l_hat.allFinite() || !std::isfinite(c_hat))
    throw InvalidInstance("non-finite instance data");
  if ((q_hat - q_hat.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidInstance("q_hat must be symmetric");
  if (static_cast<int>(domains.size()) != n)
    throw InvalidInstance("domain count mismatch");
  for (const auto& [l, u] : domains) {
    if (l > u) throw InvalidInstance("empty variable domain");
  }
  for (const auto& lc : linear_constraints) {
    if (lc.a.size() != n) throw InvalidInstance("constraint length mismatch");
    if (lc.a.norm() == 0.0) throw InvalidInstance("zero constraint vector");
  }
}

double objective_value(const IqpInstance& inst,
                       const std::vector<std::int64_t>& x) {
  Vector xv(inst.n);
  for (int i = 0; i < inst.n; ++i) xv(i) = static_cast<double>(x[i]);
  return xv.dot(inst.q_hat * xv) + inst.l_hat.dot(xv) + inst.c_hat;
}

bool point_feasible(const IqpInstance& inst,
                    const std::vector<std::int64_t>& x, double tol) {
  for (int i = 0; i < inst.n; ++i) {
    if (x[i] < inst.domains[i].first || x[i] > inst.domains[i].second)
      return false;
  }
  for (const auto& lc : inst.linear_constraints) {
    double lhs = 0.0;
    for (int i = 0; i < inst.n; ++i) lhs += lc.a(i) * static_cast<double>(x[i]);
    if (lhs > lc.rhs + tol) return false;
  }
  return true;
}

Vector LinearConstraintDescriptor::row0_halved(int dim) const {
  Vector v = Vector::Zero(dim);
  v(0) = 0.5 * a00;
  v.tail(dim - 1) = 0.5 * a;
  return v;
}

std::int64_t SdpRelaxation::max_domain_size() const {
  std::int64_t best = 1;
  for (std::size_t i = 0; i < var_l.size(); ++i) {
    best = std::max(best, var_u[i] - var_l[i] + 1);
  }
  return best;
}

Vector SdpRelaxation::b() const {
  Vector out(dual_dim());
  out(0) = 1.0;
  for (int f = 0; f < m(); ++f) out(1 + f) = facets[f].beta;
  for (int k = 0; k < p(); ++k) out(1 + m() + k) = linear[k].beta;
  return out;
}

int SdpRelaxation::facet_index(int var, std::int64_t j) const {
  return facet_offset[var - 1] + static_cast<int>(j - var_l[var - 1]);
}

double SdpRelaxation::facet_beta(int var, std::int64_t j, bool upper) const {
  const std::int64_t l = var_l[var - 1], u = var_u[var - 1];
  switch (policy) {
    case BetaPolicy::AllZero:
      return 0.0;
    case BetaPolicy::RankOne:
      return upper ? 0.25 * static_cast<double>((l - u) * (l - u)) : -0.25;
    case BetaPolicy::ZeroFirstEntry:
    default:
      return upper ? -static_cast<double>(l * u)
                   : static_cast<double>(j * (j + 1));
  }
}

SdpRelaxation build_relaxation(const IqpInstance& inst, BetaPolicy policy) {
  inst.validate();
  SdpRelaxation rel;
  rel.policy = policy;
  rel.dim = inst.n + 1;
  rel.q = Matrix::Zero(rel.dim, rel.dim);
  rel.q(0, 0) = inst.c_hat;
  rel.q.block(0, 1, 1, inst.n) = 0.5 * inst.l_hat.transpose();
  rel.q.block(1, 0, inst.n, 1) = 0.5 * inst.l_hat;
  rel.q.block(1, 1, inst.n, inst.n) = inst.q_hat;

  rel.var_l.resize(inst.n);
  rel.var_u.resize(inst.n);
  rel.facet_offset.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const auto [l, u] = inst.domains[i];
    rel.var_l[i] = l;
    rel.var_u[i] = u;
    rel.facet_offset[i] = static_cast<int>(rel.facets.size());
    for (std::int64_t j = l; j < u; ++j) {
      FacetDescriptor f;
      f.var = i + 1;
      f.j = j;
      f.upper = false;
      f.beta = rel.facet_beta(i + 1, j, false);
      f.a00 = f.beta - static_cast<double>(j * (j + 1));
      f.a0i = static_cast<double>(j) + 0.5;
      f.aii = -1.0;
      rel.facets.push_back(f);
    }
    FacetDescriptor f;
    f.var = i + 1;
    f.j = u;
    f.upper = true;
    f.beta = rel.facet_beta(i + 1, u, true);
    f.a00 = f.beta + static_cast<double>(l * u);
    f.a0i = -0.5 * static_cast<double>(l + u);
    f.aii = 1.0;
    rel.facets.push_back(f);
  }

  for (std::size_t k = 0; k < inst.linear_constraints.size(); ++k) {
    const auto& lc = inst.linear_constraints[k];
    LinearConstraintDescriptor d;
    d.index = static_cast<int>(k) + 1;
    d.a = lc.a;
    d.rhs = lc.rhs;
    d.beta = (policy == BetaPolicy::ZeroFirstEntry) ? lc.rhs : 0.0;
    d.a00 = d.beta - lc.rhs;
    rel.linear.push_back(std::move(d));
  }
  return rel;
}

double facet_inner_product(const FacetDescriptor& f, const Matrix& w) {
  const int i = f.var;
  return f.a00 * w(0, 0) + 2.0 * f.a0i * w(0, i) + f.aii * w(i, i);
}

double linear_inner_product(const LinearConstraintDescriptor& lc,
                            const Matrix& w) {
  double acc = lc.a00 * w(0, 0);
  const int n = static_cast<int>(lc.a.size());
  for (int k = 1; k <= n; ++k) acc += lc.a(k - 1) * w(0, k);
  return acc;
}

Matrix dual_slack_matrix(const SdpRelaxation& rel, const Vector& y) {
  Matrix m = rel.q;
  m(0, 0) -= y(0);
  for (int f = 0; f < rel.m(); ++f) {
    const auto& fd = rel.facets[f];
    const double yf = y(1 + f);
    if (yf == 0.0) continue;
    const int i = fd.var;
    m(0, 0) -= yf * fd.a00;
    m(0, i) -= yf * fd.a0i;
    m(i, 0) -= yf * fd.a0i;
    m(i, i) -= yf * fd.aii;
  }
  for (int k = 0; k < rel.p(); ++k) {
    const auto& lc = rel.linear[k];
    const double yj = y(1 + rel.m() + k);
    if (yj == 0.0) continue;
    m(0, 0) -= yj * lc.a00;
    for (int i = 1; i <= rel.n(); ++i) {
      m(0, i) -= yj * 0.5 * lc.a(i - 1);
      m(i, 0) -= yj * 0.5 * lc.a(i - 1);
    }
  }
  return m;
}

Matrix dense_facet_matrix(const SdpRelaxation& rel, const FacetDescriptor& f) {
  Matrix a = Matrix::Zero(rel.dim, rel.dim);
  a(0, 0) = f.a00;
  a(0, f.var) = f.a0i;
  a(f.var, 0) = f.a0i;
  a(f.var, f.var) = f.aii;
  return a;
}

Matrix dense_linear_matrix(const SdpRelaxation& rel,
                           const LinearConstraintDescriptor& lc) {
  Matrix a = Matrix::Zero(rel.dim, rel.dim);
  a(0, 0) = lc.a00;
  for (int i = 1; i <= rel.n(); ++i) {
    a(0, i) = 0.5 * lc.a(i - 1);
    a(i, 0) = 0.5 * lc.a(i - 1);
  }
  return a;
}

}  // namespace iqp
