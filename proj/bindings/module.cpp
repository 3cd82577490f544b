#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "iqp/bnb.hpp"
#include "iqp/instances.hpp"
#include "iqp/oracle.hpp"
#include "iqp/primal_recovery.hpp"

namespace py = pybind11;

namespace {

iqp::Family family_from(const std::string& name) {
  if (name == "dense") return iqp::Family::DenseSpectrum;
  if (name == "sparse") return iqp::Family::Sparse;
  if (name == "lowrank") return iqp::Family::LowRank;
  throw py::value_error("unknown family: " + name);
}

iqp::ConstraintKind constraint_from(const std::string& name) {
  if (name == "none") return iqp::ConstraintKind::None;
  if (name == "sum") return iqp::ConstraintKind::SumNonpositive;
  if (name == "knapsack") return iqp::ConstraintKind::Knapsack;
  throw py::value_error("unknown constraint: " + name);
}

iqp::SolveMode mode_from(const std::string& name) {
  if (name == "cd") return iqp::SolveMode::CD;
  if (name == "cd2d") return iqp::SolveMode::CD2D;
  throw py::value_error("unknown mode: " + name);
}

const char* status_name(iqp::BnbStatus s) {
  switch (s) {
    case iqp::BnbStatus::Optimal: return "optimal";
    case iqp::BnbStatus::Infeasible: return "infeasible";
    case iqp::BnbStatus::NodeLimit: return "node_limit";
    case iqp::BnbStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

const char* dual_status_name(iqp::DualStatus s) {
  switch (s) {
    case iqp::DualStatus::Converged: return "converged";
    case iqp::DualStatus::BoundReached: return "bound_reached";
    case iqp::DualStatus::IterationLimit: return "iteration_limit";
    case iqp::DualStatus::PrimalInfeasible: return "primal_infeasible";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_iqp, m) {
  m.doc() =
      "Branch-and-bound solver for integer quadratic programs with "
      "SDP-based dual bounds";

  py::class_<iqp::LinearConstraint>(m, "LinearConstraint")
      .def(py::init<>())
      .def(py::init([](iqp::Vector a, double rhs) {
             return iqp::LinearConstraint{std::move(a), rhs};
           }),
           py::arg("a"), py::arg("rhs"))
      .def_readwrite("a", &iqp::LinearConstraint::a)
      .def_readwrite("rhs", &iqp::LinearConstraint::rhs);

  py::class_<iqp::IqpInstance>(m, "Instance")
      .def(py::init<>())
      .def_readwrite("n", &iqp::IqpInstance::n)
      .def_readwrite("q_hat", &iqp::IqpInstance::q_hat)
      .def_readwrite("l_hat", &iqp::IqpInstance::l_hat)
      .def_readwrite("c_hat", &iqp::IqpInstance::c_hat)
      .def_readwrite("domains", &iqp::IqpInstance::domains)
      .def_readwrite("linear_constraints",
                     &iqp::IqpInstance::linear_constraints)
      .def("validate", &iqp::IqpInstance::validate)
      .def("__repr__", [](const iqp::IqpInstance& inst) {
        return "<iqp.Instance n=" + std::to_string(inst.n) + " constraints=" +
               std::to_string(inst.linear_constraints.size()) + ">";
      });

  m.def("objective_value", &iqp::objective_value, py::arg("instance"),
        py::arg("x"), "Quadratic objective at an integer point.");
  m.def("point_feasible", &iqp::point_feasible, py::arg("instance"),
        py::arg("x"), py::arg("tol") = 1e-9);

  m.def(
      "generate",
      [](int n, const std::string& family, int p, const std::string& domain,
         std::int64_t lo, std::int64_t hi, const std::string& constraint,
         std::uint64_t seed) {
        iqp::GenSpec spec;
        spec.n = n;
        spec.family = family_from(family);
        spec.p = p;
        if (domain == "ternary") {
          spec.domain = iqp::DomainKind::Ternary;
        } else if (domain == "box") {
          spec.domain = iqp::DomainKind::IntegerBox;
        } else if (domain == "custom") {
          spec.domain = iqp::DomainKind::Custom;
        } else {
          throw py::value_error("unknown domain: " + domain);
        }
        spec.lo = lo;
        spec.hi = hi;
        spec.constraint = constraint_from(constraint);
        spec.seed = seed;
        return iqp::generate(spec);
      },
      py::arg("n"), py::arg("family") = "dense", py::arg("p") = 50,
      py::arg("domain") = "ternary", py::arg("lo") = -10, py::arg("hi") = 10,
      py::arg("constraint") = "none", py::arg("seed") = 0,
      "Deterministic random instance from the built-in families.");

  m.def("format_instance", &iqp::format_instance);
  m.def("parse_instance", &iqp::parse_instance);
  m.def("write_instance", &iqp::write_instance, py::arg("instance"),
        py::arg("path"));
  m.def("read_instance", &iqp::read_instance, py::arg("path"));

  m.def(
      "solve",
      [](const iqp::IqpInstance& inst, const std::string& mode,
         long node_limit, double time_limit, double gap, double opt_eps) {
        iqp::BnbConfig cfg;
        cfg.solver.mode = mode_from(mode);
        cfg.node_limit = node_limit;
        cfg.time_limit = time_limit;
        cfg.solver.gap_fraction = gap;
        cfg.solver.opt_eps = opt_eps;
        const iqp::BnbResult res = iqp::solve(inst, cfg);
        py::dict out;
        out["status"] = status_name(res.status);
        out["nodes"] = res.nodes_explored;
        out["root_bound"] = res.root_bound;
        out["time_seconds"] = res.elapsed_seconds;
        if (!res.x.empty()) {
          out["objective"] = res.objective;
          out["x"] = res.x;
        }
        return out;
      },
      py::arg("instance"), py::arg("mode") = "cd2d",
      py::arg("node_limit") = 1'000'000, py::arg("time_limit") = 0.0,
      py::arg("gap") = 0.1, py::arg("opt_eps") = 1e-6,
      "Branch-and-bound solve; returns a result dict.");

  m.def(
      "root_bound",
      [](const iqp::IqpInstance& inst, const std::string& mode,
         std::optional<double> incumbent) {
        const auto rel = iqp::build_relaxation(inst);
        iqp::SolverConfig cfg;
        cfg.mode = mode_from(mode);
        const auto res = iqp::solve_dual(rel, cfg, incumbent);
        py::dict out;
        out["bound"] = res.bound;
        out["status"] = dual_status_name(res.status);
        out["iterations"] = res.iterations;
        return out;
      },
      py::arg("instance"), py::arg("mode") = "cd2d",
      py::arg("incumbent") = py::none(),
      "Dual bound of the root SDP relaxation.");

  m.def(
      "recover_primal",
      [](const iqp::IqpInstance& inst, const std::string& mode) {
        const auto rel = iqp::build_relaxation(inst);
        iqp::SolverConfig cfg;
        cfg.mode = mode_from(mode);
        const auto dual = iqp::solve_dual(rel, cfg);
        const auto rec = iqp::recover_primal(rel, dual.y);
        py::dict out;
        out["x"] = rec.x;
        out["x_matrix"] = rec.x_matrix;
        out["min_eig_x"] = rec.min_eig_x;
        out["psd_ok"] = rec.psd_ok;
        out["bound"] = dual.bound;
        return out;
      },
      py::arg("instance"), py::arg("mode") = "cd2d",
      "Root dual solve followed by primal matrix recovery.");

  m.def(
      "enumerate_optimum",
      [](const iqp::IqpInstance& inst,
         std::int64_t cap) -> py::object {
        const auto r = iqp::oracle::enumerate_optimum(inst, cap);
        if (!r) return py::none();
        return py::make_tuple(r->value, r->x);
      },
      py::arg("instance"), py::arg("cap") = 10'000'000,
      "Exhaustive optimum (value, x) or None when infeasible.");
}
