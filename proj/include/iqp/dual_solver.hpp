#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "iqp/model.hpp"

namespace iqp {

enum class SolveMode { CD, CD2D };

/// How the interior candidate of a lower-facet family is located: from the
/// exact quadratic coefficients under the active beta policy, or from the
/// fixed w0i/w00 - 1/2 expression (valid for the AllZero policy).
enum class VertexRule { PolicyExact, FixedRatio };

struct SolverConfig {
  double sigma_init = 1.0;
  double sigma_factor = 0.25;
  double sigma_floor = 1e-8;
  // <= 0 selects the domain-size based default: 0.1 when the largest
  // domain has at most 3 values, 0.001 otherwise.
  double grad_threshold = 0.0;
  double gap_fraction = 0.1;
  double opt_eps = 1e-6;
  long check_period = 0;    // <= 0: n
  long min_iterations = 0;  // <= 0: max|D_i| * n
  SolveMode mode = SolveMode::CD2D;
  VertexRule vertex_rule = VertexRule::PolicyExact;
  double neg_step_cap = -1e6;
  long refactor_period = 200;
  long max_iterations = 2'000'000;
  // <= 0 selects the default: incumbent + 1, or 1e12 with no incumbent.
  double infeasibility_threshold = 0.0;
  // dense positive-definiteness check after every accepted step
  bool paranoid = false;
  // called with <b,y> after the starting point and after every update
  std::function<void(double)> bound_observer;
};

enum class DualStatus {
  Converged,
  BoundReached,
  IterationLimit,
  PrimalInfeasible
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

struct DualState {
  Vector y;  // flat layout [y0, facet duals..., linear duals...]
  Matrix w;  // (Q - A^T y)^{-1}
  double sigma = 1.0;
  long iterations = 0;
  double bound = 0.0;  // current <b,y>
  double best_bound = -std::numeric_limits<double>::infinity();
  long updates_since_refactor = 0;
  double max_refactor_drift = 0.0;
  // drift divided by max(1, ||W||_max): meaningful once the barrier is
  // small and the entries of W grow like 1/sigma
  double max_refactor_drift_rel = 0.0;
  long woodbury_skips = 0;
  long facet_cap_warnings = 0;
};

struct DualResult {
  DualStatus status = DualStatus::Converged;
  double bound = -std::numeric_limits<double>::infinity();
  Vector y;
  long iterations = 0;
  double sigma_final = 0.0;
  double max_refactor_drift = 0.0;
  double max_refactor_drift_rel = 0.0;
  long woodbury_skips = 0;
  long facet_cap_warnings = 0;
};

struct CoordinateChoice {
  enum class Kind { None, Zero, Facet, Linear };
  Kind kind = Kind::None;
  int index = -1;     // into rel.facets or rel.linear
  double entry = 0.0; // selection score
};

struct StepOutcome {
  enum class Kind { InteriorRoot, ClampedToZeroDual, CappedRay, NoMove };
  Kind kind = Kind::NoMove;
  double s = 0.0;
};

struct Step2dOutcome {
  StepOutcome::Kind kind = StepOutcome::Kind::NoMove;
  double s = 0.0;
  double s0 = 0.0;
};

/// Strictly feasible starting point with W precomputed.
DualState initial_point(const SdpRelaxation& rel, double sigma_init = 1.0);

double gradient_entry_facet(const DualState& state, const FacetDescriptor& f);
double gradient_entry_linear(const DualState& state,
                             const LinearConstraintDescriptor& lc);
double gradient_entry_zero(const DualState& state);

/// d = v^T W v and f = W_{0.}^T v for the halved first row v of A_j.
std::pair<double, double> linear_scalars(const DualState& state,
                                         const LinearConstraintDescriptor& lc);

/// g'_ij(0) / g'_j(0): selection score for the plane search.
double coordinate_score_2d(const DualState& state, const SdpRelaxation& rel,
                           CoordinateChoice::Kind kind, int index);

CoordinateChoice select_coordinate(
    const DualState& state, const SdpRelaxation& rel, const SolverConfig& cfg,
    const std::vector<CoordinateChoice>& exclude = {});

CoordinateChoice select_coordinate_2d(
    const DualState& state, const SdpRelaxation& rel, const SolverConfig& cfg,
    const std::vector<CoordinateChoice>& exclude = {});

StepOutcome step_zero_coordinate(const DualState& state);
StepOutcome step_facet_rank1(const DualState& state, const FacetDescriptor& f,
                             double entry, double y_f, double neg_step_cap);
StepOutcome step_facet_rank2(const DualState& state, const FacetDescriptor& f,
                             double entry, double y_f, double neg_step_cap);
StepOutcome step_linear(const DualState& state,
                        const LinearConstraintDescriptor& lc, double entry,
                        double y_j, double neg_step_cap);
Step2dOutcome step_2d(const DualState& state, const SdpRelaxation& rel,
                      const CoordinateChoice& choice, double neg_step_cap);

DualResult solve_dual(const SdpRelaxation& rel, const SolverConfig& cfg,
                      std::optional<double> incumbent = std::nullopt);

}  // namespace iqp
