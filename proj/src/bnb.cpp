#include "iqp/bnb.hpp"

#include <chrono>
#include <cmath>
#include <queue>

namespace iqp {

namespace {

double total_violation(const IqpInstance& inst,
                       const std::vector<std::int64_t>& x) {
  double v = 0.0;
  for (const auto& lc : inst.linear_constraints) {
    double lhs = 0.0;
    for (int i = 0; i < inst.n; ++i) lhs += lc.a(i) * static_cast<double>(x[i]);
    v += std::max(0.0, lhs - lc.rhs);
  }
  return v;
}

std::int64_t round_into(double v, std::int64_t lo, std::int64_t hi) {
  const std::int64_t r = std::llround(v);
  return std::min(hi, std::max(lo, r));
}

}  // namespace

std::optional<std::pair<std::vector<std::int64_t>, double>> heuristic_point(
    const IqpInstance& inst, const Vector& x_estimate) {
  std::vector<std::int64_t> x(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    x[i] = round_into(x_estimate(i), inst.domains[i].first,
                      inst.domains[i].second);
  }
  double viol = total_violation(inst, x);
  for (int pass = 0; pass < inst.n && viol > 1e-9; ++pass) {
    double best_viol = viol;
    int best_i = -1;
    std::int64_t best_val = 0;
    for (int i = 0; i < inst.n; ++i) {
      for (const std::int64_t cand : {x[i] - 1, x[i] + 1}) {
        if (cand < inst.domains[i].first || cand > inst.domains[i].second)
          continue;
        const std::int64_t keep = x[i];
        x[i] = cand;
        const double v = total_violation(inst, x);
        x[i] = keep;
        if (v < best_viol) {
          best_viol = v;
          best_i = i;
          best_val = cand;
        }
      }
    }
    if (best_i < 0) break;  // no strictly improving single move
    x[best_i] = best_val;
    viol = best_viol;
  }
  if (viol > 1e-9) return std::nullopt;
  return std::make_pair(x, objective_value(inst, x));
}

std::pair<BnbNode, BnbNode> branch(const BnbNode& node,
                                   const Vector& x_estimate) {
  const int n = static_cast<int>(node.domains.size());
  int best_i = -1;
  double best_frac = 1e-9;
  for (int i = 0; i < n; ++i) {
    const auto [l, u] = node.domains[i];
    if (l == u) continue;
    const double xi = std::min(static_cast<double>(u),
                               std::max(static_cast<double>(l), x_estimate(i)));
    const double frac =
        std::min(xi - std::floor(xi), std::ceil(xi) - xi);
    if (frac > best_frac) {
      best_frac = frac;
      best_i = i;
    }
  }
  std::int64_t split;
  if (best_i < 0) {
    // all estimates integral: widest domain, midpoint split
    std::int64_t widest = 0;
    for (int i = 0; i < n; ++i) {
      const auto [l, u] = node.domains[i];
      if (u - l > widest) {
        widest = u - l;
        best_i = i;
      }
    }
    if (best_i < 0) {
      throw std::logic_error("branch: all domains are singletons");
    }
    const auto [l, u] = node.domains[best_i];
    split = l + (u - l) / 2;
  } else {
    const auto [l, u] = node.domains[best_i];
    const double xi = std::min(static_cast<double>(u),
                               std::max(static_cast<double>(l), x_estimate(best_i)));
    split = static_cast<std::int64_t>(std::floor(xi));
    split = std::min(u - 1, std::max(l, split));
  }
  BnbNode left = node, right = node;
  left.domains[best_i].second = split;
  right.domains[best_i].first = split + 1;
  left.depth = right.depth = node.depth + 1;
  return {std::move(left), std::move(right)};
}

BnbResult solve(const IqpInstance& inst, const BnbConfig& cfg) {
  inst.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  auto cmp = [](const BnbNode& a, const BnbNode& b) {
    return a.parent_bound > b.parent_bound;  // min-heap on parent bound
  };
  std::priority_queue<BnbNode, std::vector<BnbNode>, decltype(cmp)> queue(cmp);

  BnbNode root;
  root.domains = inst.domains;
  queue.push(root);

  BnbResult res;
  std::optional<double> incumbent;
  std::vector<std::int64_t> best_x;
  const double opt_eps = cfg.solver.opt_eps;

  auto offer = [&](const std::vector<std::int64_t>& x, double value) {
    if (!incumbent || value < *incumbent) {
      incumbent = value;
      best_x = x;
    }
  };

  auto finish = [&](BnbStatus status) {
    res.status = status;
    if (incumbent) {
      res.objective = *incumbent;
      res.x = best_x;
    } else if (status == BnbStatus::Optimal) {
      res.status = BnbStatus::Infeasible;
    }
    res.elapsed_seconds = elapsed();
    return res;
  };

  while (!queue.empty()) {
    if (res.nodes_explored >= cfg.node_limit) {
      return finish(BnbStatus::NodeLimit);
    }
    if (cfg.time_limit > 0.0 && elapsed() > cfg.time_limit) {
      return finish(BnbStatus::TimeLimit);
    }
    BnbNode node = queue.top();
    queue.pop();
    if (incumbent && node.parent_bound >= *incumbent - opt_eps) continue;

    IqpInstance sub = inst;
    sub.domains = node.domains;

    bool all_singleton = true;
    for (const auto& [l, u] : node.domains) {
      if (l != u) {
        all_singleton = false;
        break;
      }
    }
    if (all_singleton) {
      ++res.nodes_explored;
      std::vector<std::int64_t> x(inst.n);
      for (int i = 0; i < inst.n; ++i) x[i] = node.domains[i].first;
      if (point_feasible(inst, x)) offer(x, objective_value(inst, x));
      continue;
    }

    const SdpRelaxation rel = build_relaxation(sub, cfg.policy);
    SolverConfig solver_cfg = cfg.solver;
    std::vector<double> history;
    if (cfg.node_observer) {
      solver_cfg.bound_observer = [&history](double b) {
        history.push_back(b);
      };
    }
    const DualResult dual = solve_dual(rel, solver_cfg, incumbent);
    ++res.nodes_explored;
    if (node.depth == 0) res.root_bound = dual.bound;
    if (cfg.node_observer) {
      cfg.node_observer(NodeReport{node, sub, dual, history});
    }

    if (dual.status == DualStatus::PrimalInfeasible) continue;
    if (incumbent && dual.bound >= *incumbent - opt_eps) continue;

    const RecoveryResult rec = recover_primal(rel, dual.y);
    if (auto h = heuristic_point(sub, rec.x)) offer(h->first, h->second);
    if (incumbent && dual.bound >= *incumbent - opt_eps) continue;

    auto [left, right] = branch(node, rec.x);
    left.parent_bound = dual.bound;
    right.parent_bound = dual.bound;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }
  return finish(BnbStatus::Optimal);
}

}  // namespace iqp
