#pragma once

#include <functional>
#include <optional>

#include "iqp/dual_solver.hpp"
#include "iqp/primal_recovery.hpp"

namespace iqp {

struct BnbNode {
  std::vector<std::pair<std::int64_t, std::int64_t>> domains;
  int depth = 0;
  double parent_bound = -std::numeric_limits<double>::infinity();
};

enum class BnbStatus { Optimal, Infeasible, NodeLimit, TimeLimit };

struct BnbResult {
  BnbStatus status = BnbStatus::Optimal;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> x;
  long nodes_explored = 0;
  double root_bound = -std::numeric_limits<double>::infinity();
  double elapsed_seconds = 0.0;
};

/// Diagnostic callback fired after each node's relaxation solve.
struct NodeReport {
  const BnbNode& node;
  const IqpInstance& sub_instance;
  const DualResult& dual;
  const std::vector<double>& bound_history;  // <b,y> per iteration
};

struct BnbConfig {
  long node_limit = 1'000'000;
  double time_limit = 0.0;  // seconds; <= 0 means unlimited
  SolverConfig solver;
  BetaPolicy policy = BetaPolicy::ZeroFirstEntry;
  std::function<void(const NodeReport&)> node_observer;
};

BnbResult solve(const IqpInstance& inst, const BnbConfig& cfg = {});

/// Rounds the estimate into the domains and greedily repairs linear
/// violations; nullopt when no feasible point is reached.
std::optional<std::pair<std::vector<std::int64_t>, double>> heuristic_point(
    const IqpInstance& inst, const Vector& x_estimate);

/// Splits the node on the most fractional coordinate of the estimate
/// (fallback: largest domain, midpoint split).
std::pair<BnbNode, BnbNode> branch(const BnbNode& node,
                                   const Vector& x_estimate);

}  // namespace iqp
