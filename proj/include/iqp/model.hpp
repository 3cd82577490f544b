#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "iqp/linalg.hpp"

namespace iqp {

using linalg::Matrix;
using linalg::Vector;

struct LinearConstraint {
  Vector a;    // coefficient vector, length n
  double rhs;  // a^T x <= rhs
};

struct InvalidInstance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Integer quadratic program: min x^T q_hat x + l_hat^T x + c_hat over
/// x_i in {domains[i].first, ..., domains[i].second}, subject to the
/// optional linear inequalities.
struct IqpInstance {
  int n = 0;
  Matrix q_hat;
  Vector l_hat;
  double c_hat = 0.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> domains;
  std::vector<LinearConstraint> linear_constraints;

  void validate() const;
};

double objective_value(const IqpInstance& inst,
                       const std::vector<std::int64_t>& x);

bool point_feasible(const IqpInstance& inst,
                    const std::vector<std::int64_t>& x,
                    double tol = 1e-9);

/// Choice of the free right-hand-side shift beta. ZeroFirstEntry makes
/// every facet matrix have a zero (0,0) entry; RankOne makes every facet
/// matrix rank one.
enum class BetaPolicy { ZeroFirstEntry, AllZero, RankOne };

/// One facet of P(D_i), stored as the three nonzero entries of its
/// constraint matrix in S_{n+1}.
struct FacetDescriptor {
  int var = 0;           // variable index, 1-based
  std::int64_t j = 0;    // lower facets j = l..u-1; the upper facet has j = u
  bool upper = false;
  double beta = 0.0;
  double a00 = 0.0;
  double a0i = 0.0;
  double aii = 0.0;

  // det of the 2x2 block {0,i}; zero iff the matrix has rank one
  double alpha1() const { return a00 * aii - a0i * a0i; }
  bool rank_one() const { return std::abs(alpha1()) < 1e-12; }
};

struct LinearConstraintDescriptor {
  int index = 0;  // 1-based
  Vector a;
  double rhs = 0.0;
  double beta = 0.0;
  double a00 = 0.0;  // beta - rhs
  // row 0 of the constraint matrix is (a00, a/2); the halved version used
  // in the d/f scalars replaces a00 by a00/2
  Vector row0_halved(int dim) const;
};

/// The beta-parameterized constraint system of the SDP relaxation.
struct SdpRelaxation {
  int dim = 0;  // n+1
  Matrix q;     // augmented objective matrix
  std::vector<FacetDescriptor> facets;
  std::vector<LinearConstraintDescriptor> linear;
  std::vector<std::int64_t> var_l, var_u;  // domains used to build facets
  std::vector<int> facet_offset;           // per variable start into facets
  BetaPolicy policy = BetaPolicy::ZeroFirstEntry;

  int n() const { return dim - 1; }
  int m() const { return static_cast<int>(facets.size()); }
  int p() const { return static_cast<int>(linear.size()); }
  int dual_dim() const { return 1 + m() + p(); }
  std::int64_t max_domain_size() const;

  // flat dual vector layout: [y0, facets..., linear...]
  Vector b() const;
  int facet_index(int var, std::int64_t j) const;

  double facet_beta(int var, std::int64_t j, bool upper) const;
};

SdpRelaxation build_relaxation(const IqpInstance& inst,
                               BetaPolicy policy = BetaPolicy::ZeroFirstEntry);

/// <A_f, W> using only the three nonzero entries, O(1).
double facet_inner_product(const FacetDescriptor& f, const Matrix& w);

/// <A_j, W> for a linear constraint, O(n).
double linear_inner_product(const LinearConstraintDescriptor& lc,
                            const Matrix& w);

/// Dense Q - A^T y for a flat dual vector.
Matrix dual_slack_matrix(const SdpRelaxation& rel, const Vector& y);

/// Dense reconstruction of a constraint matrix (test/recovery use only).
Matrix dense_facet_matrix(const SdpRelaxation& rel, const FacetDescriptor& f);
Matrix dense_linear_matrix(const SdpRelaxation& rel,
                           const LinearConstraintDescriptor& lc);

}  // namespace iqp
