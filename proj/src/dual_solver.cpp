#include "iqp/dual_solver.hpp"

#include <algorithm>
#include <cmath>

namespace iqp {

namespace {

constexpr double kRootTol = 1e-14;
// Barrier level below which every accepted step is re-verified with a dense
// Cholesky factorization of the slack matrix.
constexpr double kValidateSigma = 1e-4;

// Roots of a*s^2 + b*s + c = 0, ascending. Returns the root count.
int solve_quadratic(double a, double b, double c, double r[2]) {
  if (a == 0.0) {
    if (b == 0.0) return 0;
    r[0] = -c / b;
    return 1;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return 0;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r1, r2;
  if (q == 0.0) {
    r1 = r2 = 0.0;
  } else {
    r1 = q / a;
    r2 = c / q;
  }
  if (r1 > r2) std::swap(r1, r2);
  r[0] = r1;
  r[1] = r2;
  return 2;
}

std::optional<double> smallest_root_at_least(double a, double b, double c,
                                             double lo) {
  double r[2];
  const int k = solve_quadratic(a, b, c, r);
  for (int i = 0; i < k; ++i) {
    if (r[i] >= lo) return r[i];
  }
  return std::nullopt;
}

std::optional<double> largest_root_at_most(double a, double b, double c,
                                           double hi) {
  double r[2];
  const int k = solve_quadratic(a, b, c, r);
  for (int i = k - 1; i >= 0; --i) {
    if (r[i] <= hi) return r[i];
  }
  return std::nullopt;
}

// Largest strictly negative root of a*s^2 + b*s + c = 0; along a descent
// ray starting inside the cone this is the first boundary crossing.
std::optional<double> nearest_negative_root(double a, double b, double c) {
  double r[2];
  const int k = solve_quadratic(a, b, c, r);
  std::optional<double> best;
  for (int i = 0; i < k; ++i) {
    if (r[i] < 0.0 && (!best || r[i] > *best)) best = r[i];
  }
  return best;
}

// Step size for an unbounded descent ray: the nominal cap, pulled in so the
// iterate stays strictly inside the cone when the ray exits it.
double capped_descent(double neg_step_cap, std::optional<double> boundary) {
  if (boundary && *boundary < 0.0) {
    const double capped = 0.995 * *boundary;
    if (capped > neg_step_cap) return capped;
  }
  return neg_step_cap;
}

// Quadratic-in-j coefficients of beta(j) for the lower-facet family under
// the given policy: beta(j) = bc2*j^2 + bc1*j + bc0.
void lower_beta_coeffs(BetaPolicy policy, double& bc2, double& bc1,
                       double& bc0) {
  switch (policy) {
    case BetaPolicy::ZeroFirstEntry:
      bc2 = 1.0;
      bc1 = 1.0;
      bc0 = 0.0;
      break;
    case BetaPolicy::RankOne:
      bc2 = 0.0;
      bc1 = 0.0;
      bc0 = -0.25;
      break;
    case BetaPolicy::AllZero:
    default:
      bc2 = bc1 = bc0 = 0.0;
      break;
  }
}

}  // namespace

DualState initial_point(const SdpRelaxation& rel, double sigma_init) {
  DualState st;
  st.sigma = sigma_init;
  st.y = Vector::Zero(rel.dual_dim());

  if (linalg::min_eigenvalue(rel.q) <= 1e-9) {
    const int n = rel.n();
    const Matrix q_hat = rel.q.block(1, 1, n, n);
    const double y_tilde = std::min(linalg::min_eigenvalue(q_hat) - 1.0, 0.0);
    double a00_sum = 0.0;
    Vector r = rel.q.block(0, 1, 1, n).transpose();
    for (int i = 1; i <= n; ++i) {
      const int idx = rel.facet_index(i, rel.var_u[i - 1]);
      const auto& f = rel.facets[idx];
      a00_sum += f.a00;
      r(i - 1) -= y_tilde * f.a0i;
      st.y(1 + idx) = y_tilde;
    }
    st.y(0) = rel.q(0, 0) - y_tilde * a00_sum - 1.0 - r.squaredNorm();
  }

  try {
    st.w = linalg::dense_inverse(dual_slack_matrix(rel, st.y));
  } catch (const linalg::NotPositiveDefinite&) {
    throw InternalError("initial_point: constructed point is not interior");
  }
  st.bound = rel.b().dot(st.y);
  st.best_bound = st.bound;
  return st;
}

double gradient_entry_facet(const DualState& state, const FacetDescriptor& f) {
  return f.beta - state.sigma * facet_inner_product(f, state.w);
}

double gradient_entry_linear(const DualState& state,
                             const LinearConstraintDescriptor& lc) {
  return lc.beta - state.sigma * linear_inner_product(lc, state.w);
}

double gradient_entry_zero(const DualState& state) {
  return 1.0 - state.sigma * state.w(0, 0);
}

std::pair<double, double> linear_scalars(const DualState& state,
                                         const LinearConstraintDescriptor& lc) {
  const int dim = static_cast<int>(state.w.rows());
  const Vector v = lc.row0_halved(dim);
  const Vector wv = state.w * v;
  return {v.dot(wv), wv(0)};
}

double coordinate_score_2d(const DualState& state, const SdpRelaxation& rel,
                           CoordinateChoice::Kind kind, int index) {
  const double w00 = state.w(0, 0);
  switch (kind) {
    case CoordinateChoice::Kind::Zero:
      return gradient_entry_zero(state);
    case CoordinateChoice::Kind::Facet: {
      const auto& f = rel.facets[index];
      const double rho = state.w(0, f.var) / w00;
      return (f.beta - f.a00) - 2.0 * f.a0i * rho -
             state.sigma * f.aii * state.w(f.var, f.var) -
             f.aii * (1.0 - state.sigma * w00) * rho * rho;
    }
    case CoordinateChoice::Kind::Linear: {
      const auto [d, fsc] = linear_scalars(state, rel.linear[index]);
      (void)d;
      return rel.linear[index].beta - 2.0 * fsc / w00;
    }
    default:
      return 0.0;
  }
}

namespace {

// Shared candidate scan. score(kind, index) produces the selection entry;
// the lower-facet interior candidate is located by vertex(var) and the
// family endpoints. Candidate order matches the flat storage order so that
// first-strictly-greater tie-breaking agrees with an exhaustive scan.
template <typename ScoreFn, typename VertexFn>
CoordinateChoice select_generic(const DualState& state,
                                const SdpRelaxation& rel, double opt_eps,
                                const std::vector<CoordinateChoice>& exclude,
                                ScoreFn score, VertexFn vertex) {
  CoordinateChoice best;
  auto consider = [&](CoordinateChoice::Kind kind, int index) {
    for (const auto& ex : exclude) {
      if (ex.kind == kind && ex.index == index) return;
    }
    const double entry = score(kind, index);
    if (std::abs(entry) < opt_eps) return;
    if (kind != CoordinateChoice::Kind::Zero && entry > 0.0) {
      const int y_idx =
          kind == CoordinateChoice::Kind::Facet ? 1 + index : 1 + rel.m() + index;
      if (state.y(y_idx) >= 0.0) return;  // ascent needs slack in y <= 0
    }
    if (std::abs(entry) > std::abs(best.entry)) best = {kind, index, entry};
  };

  consider(CoordinateChoice::Kind::Zero, 0);
  for (int i = 1; i <= rel.n(); ++i) {
    const std::int64_t l = rel.var_l[i - 1], u = rel.var_u[i - 1];
    if (u > l) {
      std::vector<std::int64_t> cand;
      cand.reserve(static_cast<std::size_t>(u - l) + 2);
      cand.push_back(l);
      const double v = vertex(i);
      if (std::isfinite(v)) {
        const std::int64_t jv = std::llround(v);
        if (jv > l && jv < u - 1) cand.push_back(jv);
      }
      if (u - 1 > l) cand.push_back(u - 1);
      // A positive gradient entry is only admissible on coordinates whose
      // dual is strictly negative, and such entries can peak away from the
      // endpoints and the vertex, so every negative-dual lower facet stays
      // in the candidate set.
      for (std::int64_t j = l; j <= u - 1; ++j) {
        if (state.y(1 + rel.facet_index(i, j)) < 0.0) cand.push_back(j);
      }
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      for (const std::int64_t j : cand) {
        consider(CoordinateChoice::Kind::Facet, rel.facet_index(i, j));
      }
    }
    consider(CoordinateChoice::Kind::Facet, rel.facet_index(i, u));
  }
  for (int k = 0; k < rel.p(); ++k) {
    consider(CoordinateChoice::Kind::Linear, k);
  }
  return best;
}

}  // namespace

CoordinateChoice select_coordinate(const DualState& state,
                                   const SdpRelaxation& rel,
                                   const SolverConfig& cfg,
                                   const std::vector<CoordinateChoice>& exclude) {
  const double w00 = state.w(0, 0);
  const double sigma = state.sigma;
  auto score = [&](CoordinateChoice::Kind kind, int index) {
    switch (kind) {
      case CoordinateChoice::Kind::Zero:
        return gradient_entry_zero(state);
      case CoordinateChoice::Kind::Facet:
        return gradient_entry_facet(state, rel.facets[index]);
      default:
        return gradient_entry_linear(state, rel.linear[index]);
    }
  };
  auto vertex = [&](int var) -> double {
    const double w0i = state.w(0, var);
    if (cfg.vertex_rule == VertexRule::FixedRatio) {
      return w0i / w00 - 0.5;
    }
    // phi(j) = beta(j)*(1 - sigma*w00)
    //        + sigma*(j(j+1)*w00 - (2j+1)*w0i + w_ii)
    double bc2, bc1, bc0;
    lower_beta_coeffs(rel.policy, bc2, bc1, bc0);
    const double c2 = bc2 * (1.0 - sigma * w00) + sigma * w00;
    const double c1 = bc1 * (1.0 - sigma * w00) + sigma * (w00 - 2.0 * w0i);
    if (std::abs(c2) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
    return -c1 / (2.0 * c2);
  };
  return select_generic(state, rel, cfg.opt_eps, exclude, score, vertex);
}

CoordinateChoice select_coordinate_2d(
    const DualState& state, const SdpRelaxation& rel, const SolverConfig& cfg,
    const std::vector<CoordinateChoice>& exclude) {
  (void)cfg;
  const double w00 = state.w(0, 0);
  auto score = [&](CoordinateChoice::Kind kind, int index) {
    return coordinate_score_2d(state, rel, kind, index);
  };
  // psi(j) = j(j+1) - (2j+1)*rho + sigma*w_ii + (1 - sigma*w00)*rho^2
  // is policy-independent; its vertex sits at rho - 1/2.
  auto vertex = [&](int var) { return state.w(0, var) / w00 - 0.5; };
  return select_generic(state, rel, cfg.opt_eps, exclude, score, vertex);
}

StepOutcome step_zero_coordinate(const DualState& state) {
  return {StepOutcome::Kind::InteriorRoot,
          1.0 / state.w(0, 0) - state.sigma};
}

StepOutcome step_facet_rank1(const DualState& state, const FacetDescriptor& f,
                             double entry, double y_f, double neg_step_cap) {
  const int i = f.var;
  const double t = f.a0i * f.a0i * state.w(0, 0) +
                   2.0 * f.a0i * f.aii * state.w(0, i) +
                   f.aii * f.aii * state.w(i, i);
  if (t < linalg::kSingularGuard) return {StepOutcome::Kind::NoMove, 0.0};
  std::optional<double> root;
  if (f.beta != 0.0) root = 1.0 / (f.aii * t) - state.sigma / f.beta;
  if (entry > 0.0) {
    if (root && *root >= -kRootTol && *root <= -y_f) {
      return {StepOutcome::Kind::InteriorRoot, std::max(*root, 0.0)};
    }
    return {StepOutcome::Kind::ClampedToZeroDual, -y_f};
  }
  // Slack along the ray stays definite while 1 - (s/aii)*t > 0.
  std::optional<double> boundary;
  if (f.aii < 0.0) boundary = f.aii / t;
  const double cap = capped_descent(neg_step_cap, boundary);
  if (root && *root <= kRootTol) {
    const double s = std::min(*root, 0.0);
    if (s < cap) return {StepOutcome::Kind::CappedRay, cap};
    return {StepOutcome::Kind::InteriorRoot, s};
  }
  return {StepOutcome::Kind::CappedRay, cap};
}

StepOutcome step_facet_rank2(const DualState& state, const FacetDescriptor& f,
                             double entry, double y_f, double neg_step_cap) {
  const int i = f.var;
  const double w00 = state.w(0, 0), w0i = state.w(0, i), wii = state.w(i, i);
  const double w2 = w00 * wii - w0i * w0i;
  const double alpha1 = f.alpha1();
  const double alpha2 = facet_inner_product(f, state.w);
  const double qa = f.beta * alpha1 * w2;
  const double qb = 2.0 * state.sigma * alpha1 * w2 - alpha2 * f.beta;
  const double qc = f.beta - state.sigma * alpha2;  // gradient entry at s=0
  if (entry > 0.0) {
    const auto root = smallest_root_at_least(qa, qb, qc, -kRootTol);
    if (root && *root <= -y_f) {
      return {StepOutcome::Kind::InteriorRoot, std::max(*root, 0.0)};
    }
    return {StepOutcome::Kind::ClampedToZeroDual, -y_f};
  }
  // det(M - s*A) = det(M) * (alpha1*w2*s^2 - alpha2*s + 1); stop short of
  // the first crossing when the descent ray exits the cone.
  const double cap = capped_descent(
      neg_step_cap, nearest_negative_root(alpha1 * w2, -alpha2, 1.0));
  const auto root = largest_root_at_most(qa, qb, qc, kRootTol);
  if (!root) return {StepOutcome::Kind::CappedRay, cap};
  const double s = std::min(*root, 0.0);
  if (s < cap) return {StepOutcome::Kind::CappedRay, cap};
  return {StepOutcome::Kind::InteriorRoot, s};
}

StepOutcome step_linear(const DualState& state,
                        const LinearConstraintDescriptor& lc, double entry,
                        double y_j, double neg_step_cap) {
  const auto [d, fsc] = linear_scalars(state, lc);
  const double w00 = state.w(0, 0);
  const double sigma = state.sigma;
  const double qa = lc.beta * (d * w00 - fsc * fsc);
  const double qb =
      2.0 * d * sigma * w00 - 2.0 * fsc * fsc * sigma + 2.0 * lc.beta * fsc;
  const double qc = 2.0 * fsc * sigma - lc.beta;  // = -(gradient entry)
  if (entry > 0.0) {
    const auto root = smallest_root_at_least(qa, qb, qc, -kRootTol);
    if (root && *root <= -y_j) {
      return {StepOutcome::Kind::InteriorRoot, std::max(*root, 0.0)};
    }
    return {StepOutcome::Kind::ClampedToZeroDual, -y_j};
  }
  // det(M - s*A) = det(M) * ((f^2 - d*w00)*s^2 - 2*f*s + 1); the leading
  // coefficient is <= 0 by Cauchy-Schwarz, so a descent ray always exits
  // the cone at a finite boundary.
  const double cap = capped_descent(
      neg_step_cap,
      nearest_negative_root(fsc * fsc - d * w00, -2.0 * fsc, 1.0));
  const auto root = largest_root_at_most(qa, qb, qc, kRootTol);
  if (!root) return {StepOutcome::Kind::CappedRay, cap};
  const double s = std::min(*root, 0.0);
  if (s < cap) return {StepOutcome::Kind::CappedRay, cap};
  return {StepOutcome::Kind::InteriorRoot, s};
}

Step2dOutcome step_2d(const DualState& state, const SdpRelaxation& rel,
                      const CoordinateChoice& choice, double neg_step_cap) {
  const double w00 = state.w(0, 0);
  const double sigma = state.sigma;

  if (choice.kind == CoordinateChoice::Kind::Zero) {
    return {StepOutcome::Kind::InteriorRoot, 0.0, 1.0 / w00 - sigma};
  }

  if (choice.kind == CoordinateChoice::Kind::Facet) {
    const auto& f = rel.facets[choice.index];
    const int i = f.var;
    const double w0i = state.w(0, i), wii = state.w(i, i);
    const double w2 = w00 * wii - w0i * w0i;
    const double alpha1 = f.alpha1();
    const double alpha2 = facet_inner_product(f, state.w);
    const double y_f = state.y(1 + choice.index);
    // With the (0,0) coordinate re-optimized at every s, the profile
    // derivative is Num(s)/N00(s)^2 where
    //   N00(s) = w00 - aii*w2*s,  N0i(s) = w0i + a0i*w2*s,
    //   Num(s) = (beta - a00)*N00^2 - 2*a0i*N0i*N00 - aii*N0i^2
    //            - sigma*aii*w2*N00,
    // and the denominator D(s) = alpha1*w2*s^2 - alpha2*s + 1 governs
    // positive definiteness together with N00 > 0.
    const double gamma = f.beta - f.a00;
    const double a1 = -f.aii * w2, a0 = w00;
    const double b1 = f.a0i * w2, b0 = w0i;
    const double c2 = gamma * a1 * a1 - 2.0 * f.a0i * b1 * a1 - f.aii * b1 * b1;
    const double c1 = 2.0 * gamma * a0 * a1 -
                      2.0 * f.a0i * (b0 * a1 + b1 * a0) - 2.0 * f.aii * b0 * b1 -
                      sigma * f.aii * w2 * a1;
    const double c0 = gamma * a0 * a0 - 2.0 * f.a0i * b0 * a0 -
                      f.aii * b0 * b0 - sigma * f.aii * w2 * a0;
    // Feasibility of the simultaneous (s, s0) move requires only
    // N00(s) > 0: with the companion (0,0) move the final matrix has
    // determinant det(M) * sigma * N00(s), and the path from s = 0 stays
    // inside the cone until N00 hits zero.
    auto finish = [&](double s, StepOutcome::Kind kind) -> Step2dOutcome {
      const double n00 = a0 + a1 * s;
      if (n00 <= linalg::kSingularGuard) {
        return {StepOutcome::Kind::NoMove, 0.0, 0.0};
      }
      const double dd = alpha1 * w2 * s * s - alpha2 * s + 1.0;
      return {kind, s, dd / n00 - sigma};
    };
    auto feasible = [&](double s) { return a0 + a1 * s > linalg::kSingularGuard; };
    if (choice.entry > 0.0) {
      const auto root = smallest_root_at_least(c2, c1, c0, -kRootTol);
      if (root && *root <= -y_f && feasible(*root)) {
        return finish(std::max(*root, 0.0), StepOutcome::Kind::InteriorRoot);
      }
      return finish(-y_f, StepOutcome::Kind::ClampedToZeroDual);
    }
    // With the companion (0,0) move the pair stays feasible while
    // N00(s) = a0 + a1*s > 0; cap descent short of that boundary.
    std::optional<double> boundary;
    if (a1 > 0.0) boundary = -a0 / a1;
    const double cap = capped_descent(neg_step_cap, boundary);
    const auto root = largest_root_at_most(c2, c1, c0, kRootTol);
    if (!root) return finish(cap, StepOutcome::Kind::CappedRay);
    const double s = std::min(*root, 0.0);
    if (s < cap) {
      return finish(cap, StepOutcome::Kind::CappedRay);
    }
    return finish(s, StepOutcome::Kind::InteriorRoot);
  }

  // Linear constraint plane search.
  const auto& lc = rel.linear[choice.index];
  const auto [d, fsc] = linear_scalars(state, lc);
  const double y_j = state.y(1 + rel.m() + choice.index);
  const double den = fsc * fsc - d * w00;  // <= 0 by Cauchy-Schwarz
  auto finish = [&](double s, StepOutcome::Kind kind) -> Step2dOutcome {
    const double s0 =
        -((d * w00 - fsc * fsc) * s * s + 2.0 * fsc * s + sigma * w00 - 1.0) /
        w00;
    return {kind, s, s0};
  };
  std::optional<double> root;
  if (std::abs(den) > 1e-300) {
    root = (2.0 * fsc - lc.beta * w00) / (2.0 * den);
  }
  if (choice.entry > 0.0) {
    if (root && *root >= -kRootTol && *root <= -y_j) {
      return finish(std::max(*root, 0.0), StepOutcome::Kind::InteriorRoot);
    }
    return finish(-y_j, StepOutcome::Kind::ClampedToZeroDual);
  }
  if (root && *root <= kRootTol) {
    const double s = std::min(*root, 0.0);
    if (s < neg_step_cap) {
      return finish(neg_step_cap, StepOutcome::Kind::CappedRay);
    }
    return finish(s, StepOutcome::Kind::InteriorRoot);
  }
  return finish(neg_step_cap, StepOutcome::Kind::CappedRay);
}

namespace {

// Re-optimized (0,0) companion move for a given step s along the chosen
// coordinate; nullopt when the point is outside the PD cone.
std::optional<double> companion_s0(const DualState& state,
                                   const SdpRelaxation& rel,
                                   const CoordinateChoice& choice, double s) {
  const double w00 = state.w(0, 0);
  const double sigma = state.sigma;
  if (choice.kind == CoordinateChoice::Kind::Zero) {
    return 1.0 / w00 - sigma;
  }
  if (choice.kind == CoordinateChoice::Kind::Facet) {
    const auto& f = rel.facets[choice.index];
    const int i = f.var;
    const double w0i = state.w(0, i), wii = state.w(i, i);
    const double w2 = w00 * wii - w0i * w0i;
    const double n00 = w00 - f.aii * w2 * s;
    const double dd = f.alpha1() * w2 * s * s -
                      facet_inner_product(f, state.w) * s + 1.0;
    // feasibility of the re-optimized pair needs only N00 > 0: the final
    // matrix has determinant det(M) * sigma * N00(s)
    if (n00 <= linalg::kSingularGuard) return std::nullopt;
    return dd / n00 - sigma;
  }
  const auto [d, fsc] = linear_scalars(state, rel.linear[choice.index]);
  return -((d * w00 - fsc * fsc) * s * s + 2.0 * fsc * s + sigma * w00 - 1.0) /
         w00;
}

// Applies the chosen step to y and W. Throws linalg::SingularUpdate when
// the rank-one/rank-two update is numerically singular.
void apply_update(DualState& state, const SdpRelaxation& rel,
                  const CoordinateChoice& choice, double s, double s0) {
  const int dim = rel.dim;
  if (choice.kind == CoordinateChoice::Kind::Zero) {
    const double total = s + s0;
    if (total != 0.0) {
      Vector e0 = Vector::Zero(dim);
      e0(0) = 1.0;
      state.w = linalg::woodbury_rank1(state.w, e0, total);
      state.y(0) += total;
    }
    return;
  }
  if (choice.kind == CoordinateChoice::Kind::Facet) {
    const auto& f = rel.facets[choice.index];
    Matrix e = Matrix::Zero(dim, 2);
    e(0, 0) = 1.0;
    e(f.var, 1) = 1.0;
    Eigen::Matrix2d abar;
    abar << s0 + s * f.a00, s * f.a0i, s * f.a0i, s * f.aii;
    state.w = linalg::woodbury_rank2(state.w, e, abar * e.transpose(), 1.0);
    state.y(1 + choice.index) += s;
    state.y(0) += s0;
    return;
  }
  const auto& lc = rel.linear[choice.index];
  const Vector v = lc.row0_halved(dim);
  Matrix e(dim, 2);
  e.col(0) = Vector::Zero(dim);
  e(0, 0) = 1.0;
  e.col(1) = v;
  Eigen::Matrix2d k;
  k << s0, s, s, 0.0;
  state.w = linalg::woodbury_rank2(state.w, e, k * e.transpose(), 1.0);
  state.y(1 + rel.m() + choice.index) += s;
  state.y(0) += s0;
}

}  // namespace

DualResult solve_dual(const SdpRelaxation& rel, const SolverConfig& cfg,
                      std::optional<double> incumbent) {
  const std::int64_t max_dom = rel.max_domain_size();
  const double grad_threshold =
      cfg.grad_threshold > 0.0 ? cfg.grad_threshold
                               : (max_dom <= 3 ? 0.1 : 0.001);
  const long check_period =
      cfg.check_period > 0 ? cfg.check_period : std::max(rel.n(), 1);
  const long min_iterations =
      cfg.min_iterations > 0
          ? cfg.min_iterations
          : static_cast<long>(max_dom) * static_cast<long>(rel.n());
  const double infeas_threshold =
      cfg.infeasibility_threshold > 0.0
          ? cfg.infeasibility_threshold
          : (incumbent ? *incumbent + 1.0 : 1e12);

  DualState state = initial_point(rel, cfg.sigma_init);
  const Vector b = rel.b();
  if (cfg.bound_observer) cfg.bound_observer(state.bound);

  auto make_result = [&](DualStatus status) {
    DualResult res;
    res.status = status;
    res.bound = state.best_bound;
    res.y = state.y;
    res.iterations = state.iterations;
    res.sigma_final = state.sigma;
    res.max_refactor_drift = state.max_refactor_drift;
    res.max_refactor_drift_rel = state.max_refactor_drift_rel;
    res.woodbury_skips = state.woodbury_skips;
    res.facet_cap_warnings = state.facet_cap_warnings;
    return res;
  };

  std::vector<CoordinateChoice> excluded;
  bool refreshed_since_apply = false;
  std::vector<int> cap_counts(rel.p(), 0);
  bool have_ref = false;
  double ref_gap = 0.0;    // with incumbent: previous gap
  double ref_bound = 0.0;  // without incumbent: previous best bound
  double ref_sigma = -1.0; // barrier level at the previous checkpoint

  // Dense refactorization; false when the current y is outside the cone
  // (possible only through accumulated roundoff in the incremental W).
  auto refresh_w = [&]() -> bool {
    try {
      Matrix dense = linalg::dense_inverse(dual_slack_matrix(rel, state.y));
      const double drift = (state.w - dense).cwiseAbs().maxCoeff();
      state.max_refactor_drift = std::max(state.max_refactor_drift, drift);
      state.max_refactor_drift_rel = std::max(
          state.max_refactor_drift_rel,
          drift / std::max(1.0, dense.cwiseAbs().maxCoeff()));
      state.w = dense;
      state.updates_since_refactor = 0;
      return true;
    } catch (const linalg::NotPositiveDefinite&) {
      return false;
    }
  };

  // GAP-based stopping, evaluated every check_period iterations once past
  // the warm-up budget.
  auto periodic_check = [&]() -> std::optional<DualStatus> {
    if (state.iterations < min_iterations ||
        state.iterations % check_period != 0) {
      return std::nullopt;
    }
    // improvement is measured across a window at a fixed barrier level;
    // a shrink between checkpoints resets the reference instead, because
    // the bound jumps right after every shrink
    const bool stable = have_ref && state.sigma == ref_sigma;
    if (incumbent) {
      const double new_gap = *incumbent - state.best_bound;
      if (new_gap < cfg.opt_eps) return DualStatus::BoundReached;
      if (stable && (1.0 - cfg.gap_fraction) * ref_gap < new_gap) {
        return DualStatus::Converged;
      }
      ref_gap = new_gap;
    } else {
      if (stable &&
          state.best_bound - ref_bound <
              cfg.gap_fraction * std::max(1.0, std::abs(state.best_bound)) *
                  1e-3) {
        return DualStatus::Converged;
      }
      ref_bound = state.best_bound;
    }
    ref_sigma = state.sigma;
    have_ref = true;
    return std::nullopt;
  };

  // A step that cannot be taken is first retried once against a freshly
  // refactorized W (skips are usually roundoff in the incremental W); if
  // it still fails, the coordinate is excluded until the next applied step.
  auto handle_skip = [&](const CoordinateChoice& choice) {
    ++state.woodbury_skips;
    if (!refreshed_since_apply) {
      if (!refresh_w()) {
        throw InternalError("solve_dual: iterate left the PD cone");
      }
      refreshed_since_apply = true;
    } else {
      excluded.push_back(choice);
    }
  };

  while (state.iterations < cfg.max_iterations) {
    if (incumbent && state.best_bound >= *incumbent - cfg.opt_eps) {
      return make_result(DualStatus::BoundReached);
    }
    if (state.best_bound >= infeas_threshold) {
      return make_result(DualStatus::PrimalInfeasible);
    }

    const CoordinateChoice choice =
        cfg.mode == SolveMode::CD
            ? select_coordinate(state, rel, cfg, excluded)
            : select_coordinate_2d(state, rel, cfg, excluded);
    if (choice.kind == CoordinateChoice::Kind::None) {
      // stationary (or fully blocked) at the current barrier level; shrink
      // the barrier and continue unless it has already hit the floor
      if (state.sigma > cfg.sigma_floor) {
        state.sigma =
            std::max(state.sigma * cfg.sigma_factor, cfg.sigma_floor);
        excluded.clear();
        if (!refresh_w()) {
          throw InternalError("solve_dual: iterate left the PD cone");
        }
        continue;
      }
      return make_result(DualStatus::Converged);
    }
    const bool sigma_trigger = std::abs(choice.entry) < grad_threshold;

    double s = 0.0, s0 = 0.0;
    StepOutcome::Kind kind = StepOutcome::Kind::NoMove;
    if (cfg.mode == SolveMode::CD2D) {
      const Step2dOutcome out = step_2d(state, rel, choice, cfg.neg_step_cap);
      kind = out.kind;
      s = out.s;
      s0 = out.s0;
    } else {
      StepOutcome out;
      switch (choice.kind) {
        case CoordinateChoice::Kind::Zero:
          out = step_zero_coordinate(state);
          break;
        case CoordinateChoice::Kind::Facet: {
          const auto& f = rel.facets[choice.index];
          const double y_f = state.y(1 + choice.index);
          out = f.rank_one() ? step_facet_rank1(state, f, choice.entry, y_f,
                                                cfg.neg_step_cap)
                             : step_facet_rank2(state, f, choice.entry, y_f,
                                                cfg.neg_step_cap);
          break;
        }
        default:
          out = step_linear(state, rel.linear[choice.index], choice.entry,
                            state.y(1 + rel.m() + choice.index),
                            cfg.neg_step_cap);
          break;
      }
      kind = out.kind;
      s = out.s;
      if (choice.kind == CoordinateChoice::Kind::Zero) {
        s0 = s;
        s = 0.0;
      }
    }

    ++state.iterations;
    if (kind == StepOutcome::Kind::NoMove || (s == 0.0 && s0 == 0.0)) {
      handle_skip(choice);
      if (auto st = periodic_check()) return make_result(*st);
      continue;
    }

    const Vector y_prev = state.y;
    const double sigma_step = state.sigma;
    bool applied = false;
    for (int attempt = 0; attempt < 2 && !applied; ++attempt) {
      try {
        apply_update(state, rel, choice, s, s0);
        applied = true;
      } catch (const linalg::SingularUpdate&) {
        s *= 0.5;
        if (cfg.mode == SolveMode::CD2D &&
            choice.kind != CoordinateChoice::Kind::Zero) {
          const auto retry = companion_s0(state, rel, choice, s);
          if (!retry) break;  // halved step still infeasible: skip coordinate
          s0 = *retry;
        }
      }
    }
    if (!applied) {
      handle_skip(choice);
      if (auto st = periodic_check()) return make_result(*st);
      continue;
    }
    // snap clamped duals exactly to zero
    if (kind == StepOutcome::Kind::ClampedToZeroDual) {
      if (choice.kind == CoordinateChoice::Kind::Facet) {
        state.y(1 + choice.index) = 0.0;
      } else if (choice.kind == CoordinateChoice::Kind::Linear) {
        state.y(1 + rel.m() + choice.index) = 0.0;
      }
    }

    // Validate the new iterate before publishing its bound. Two checks:
    // a cheap invariant (every plane step re-optimizes the (0,0) coordinate,
    // forcing w00 = 1/sigma, so a large deviation means the incremental W
    // has drifted), and -- once the barrier is small and the iterate hugs
    // the cone boundary, where the closed-form roots can overshoot by
    // roundoff -- an explicit Cholesky feasibility check of the new slack.
    bool ok = true;
    if (cfg.mode == SolveMode::CD2D &&
        std::abs(state.w(0, 0) * sigma_step - 1.0) > 0.05) {
      ok = refresh_w();
    }
    if (ok && sigma_step <= kValidateSigma) {
      ok = Eigen::LLT<Matrix>(dual_slack_matrix(rel, state.y)).info() ==
           Eigen::Success;
    }
    if (!ok) {
      // the committed step overshot the cone boundary: roll it back
      state.y = y_prev;
      if (!refresh_w()) {
        throw InternalError("solve_dual: iterate left the PD cone");
      }
      excluded.push_back(choice);
      ++state.woodbury_skips;
      if (auto st = periodic_check()) return make_result(*st);
      continue;
    }
    excluded.clear();
    refreshed_since_apply = false;

    state.bound = b.dot(state.y);
    state.best_bound = std::max(state.best_bound, state.bound);
    if (cfg.bound_observer) cfg.bound_observer(state.bound);

    if (cfg.paranoid) {
      if (linalg::min_eigenvalue(dual_slack_matrix(rel, state.y)) <= 0.0) {
        throw InternalError("solve_dual: dual iterate left the PD cone");
      }
    }

    if (kind == StepOutcome::Kind::CappedRay) {
      if (choice.kind == CoordinateChoice::Kind::Linear) {
        if (++cap_counts[choice.index] >= 3) {
          return make_result(DualStatus::PrimalInfeasible);
        }
      } else {
        ++state.facet_cap_warnings;
      }
    } else if (choice.kind == CoordinateChoice::Kind::Linear) {
      cap_counts[choice.index] = 0;
    }

    bool need_refresh =
        ++state.updates_since_refactor >= cfg.refactor_period;
    if (sigma_trigger && state.sigma > cfg.sigma_floor) {
      state.sigma = std::max(state.sigma * cfg.sigma_factor, cfg.sigma_floor);
      // near-singular phases are where incremental roundoff bites; start
      // each new barrier level from an exact W
      need_refresh = true;
    }
    if (need_refresh && !refresh_w()) {
      // the last committed step overshot the cone boundary: roll it back
      state.y = y_prev;
      state.bound = b.dot(state.y);
      if (!refresh_w()) {
        throw InternalError("solve_dual: iterate left the PD cone");
      }
      excluded.push_back(choice);
      ++state.woodbury_skips;
    }

    if (auto st = periodic_check()) return make_result(*st);
  }
  return make_result(DualStatus::IterationLimit);
}

}  // namespace iqp
