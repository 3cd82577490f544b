#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "iqp/bnb.hpp"
#include "iqp/instances.hpp"

namespace {

using nlohmann::json;

const char* status_name(iqp::BnbStatus s) {
  switch (s) {
    case iqp::BnbStatus::Optimal: return "optimal";
    case iqp::BnbStatus::Infeasible: return "infeasible";
    case iqp::BnbStatus::NodeLimit: return "node_limit";
    case iqp::BnbStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

int exit_code_for(iqp::BnbStatus s) {
  return (s == iqp::BnbStatus::Optimal || s == iqp::BnbStatus::Infeasible)
             ? 0
             : 2;
}

iqp::Family parse_family(const std::string& name) {
  if (name == "dense") return iqp::Family::DenseSpectrum;
  if (name == "sparse") return iqp::Family::Sparse;
  if (name == "lowrank") return iqp::Family::LowRank;
  throw CLI::ValidationError("--family", "unknown family: " + name);
}

iqp::DomainKind parse_domain(const std::string& name) {
  if (name == "ternary") return iqp::DomainKind::Ternary;
  if (name == "box") return iqp::DomainKind::IntegerBox;
  if (name == "custom") return iqp::DomainKind::Custom;
  throw CLI::ValidationError("--domain", "unknown domain: " + name);
}

iqp::ConstraintKind parse_constraint(const std::string& name) {
  if (name == "none") return iqp::ConstraintKind::None;
  if (name == "sum") return iqp::ConstraintKind::SumNonpositive;
  if (name == "knapsack") return iqp::ConstraintKind::Knapsack;
  throw CLI::ValidationError("--constraint", "unknown constraint: " + name);
}

struct SolveFlags {
  std::string path;
  std::string mode = "cd2d";
  double gap = 0.1;
  double opt_eps = 1e-6;
  long node_limit = 1'000'000;
  double time_limit = 0.0;
  std::uint64_t seed = 0;
  bool as_json = false;
};

iqp::BnbConfig make_config(const SolveFlags& f) {
  iqp::BnbConfig cfg;
  cfg.node_limit = f.node_limit;
  cfg.time_limit = f.time_limit;
  cfg.solver.mode =
      f.mode == "cd" ? iqp::SolveMode::CD : iqp::SolveMode::CD2D;
  cfg.solver.gap_fraction = f.gap;
  cfg.solver.opt_eps = f.opt_eps;
  return cfg;
}

int run_solve(const SolveFlags& f) {
  const iqp::IqpInstance inst = iqp::read_instance(f.path);
  const iqp::BnbResult res = iqp::solve(inst, make_config(f));
  if (f.as_json) {
    json out;
    out["schema"] = "iqp-result/1";
    out["status"] = status_name(res.status);
    out["mode"] = f.mode;
    out["nodes"] = res.nodes_explored;
    out["root_bound"] = res.root_bound;
    out["time_seconds"] = res.elapsed_seconds;
    if (!res.x.empty()) {
      out["objective"] = res.objective;
      out["x"] = res.x;
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "status:     " << status_name(res.status) << "\n";
    if (!res.x.empty()) {
      std::cout << "objective:  " << res.objective << "\n";
      std::cout << "x:         ";
      for (const auto v : res.x) std::cout << " " << v;
      std::cout << "\n";
    }
    std::cout << "nodes:      " << res.nodes_explored << "\n";
    std::cout << "root bound: " << res.root_bound << "\n";
    std::cout << "time (s):   " << res.elapsed_seconds << "\n";
  }
  return exit_code_for(res.status);
}

struct GenerateFlags {
  std::string family = "dense";
  int n = 10;
  int p = 50;
  int count = 1;
  std::uint64_t seed = 0;
  std::string domain = "ternary";
  std::int64_t lo = -10, hi = 10;
  std::string constraint = "none";
  std::string out_dir = ".";
  std::string prefix = "instance";
};

int run_generate(const GenerateFlags& f) {
  iqp::GenSpec spec;
  spec.family = parse_family(f.family);
  spec.n = f.n;
  spec.p = f.p;
  spec.domain = parse_domain(f.domain);
  spec.lo = f.lo;
  spec.hi = f.hi;
  spec.constraint = parse_constraint(f.constraint);
  std::filesystem::create_directories(f.out_dir);
  for (int i = 0; i < f.count; ++i) {
    spec.seed = f.seed + static_cast<std::uint64_t>(i);
    const iqp::IqpInstance inst = iqp::generate(spec);
    const std::string path = f.out_dir + "/" + f.prefix + "_" +
                             std::to_string(i) + ".iqp";
    iqp::write_instance(inst, path);
    std::cout << path << "\n";
  }
  return 0;
}

struct BenchFlags {
  std::string family = "dense";
  std::vector<int> ns = {10};
  int count = 10;  // per p value
  std::string mode = "both";
  double time_limit = 60.0;
  std::uint64_t seed = 0;
  std::string domain = "ternary";
  std::string constraint = "none";
  std::string csv_path;
};

struct BenchRow {
  std::string family;
  int n;
  int p;
  std::string mode;
  int solved = 0;
  int total = 0;
  double sum_nodes = 0.0;
  double sum_time = 0.0;
};

int run_bench(const BenchFlags& f) {
  std::vector<std::string> modes;
  if (f.mode == "both") {
    modes = {"cd", "cd2d"};
  } else {
    modes = {f.mode};
  }
  std::vector<BenchRow> rows;
  for (const int n : f.ns) {
    for (int p = 0; p <= 100; p += 10) {
      for (const auto& mode : modes) {
        BenchRow row{f.family, n, p, mode};
        for (int i = 0; i < f.count; ++i) {
          iqp::GenSpec spec;
          spec.family = parse_family(f.family);
          spec.n = n;
          spec.p = p;
          spec.domain = parse_domain(f.domain);
          spec.constraint = parse_constraint(f.constraint);
          spec.seed = f.seed + static_cast<std::uint64_t>(p * 1000 + i);
          const iqp::IqpInstance inst = iqp::generate(spec);
          SolveFlags sf;
          sf.mode = mode;
          sf.time_limit = f.time_limit;
          const iqp::BnbResult res = iqp::solve(inst, make_config(sf));
          ++row.total;
          if (res.status == iqp::BnbStatus::Optimal ||
              res.status == iqp::BnbStatus::Infeasible) {
            ++row.solved;
            row.sum_nodes += static_cast<double>(res.nodes_explored);
            row.sum_time += res.elapsed_seconds;
          }
        }
        rows.push_back(row);
      }
    }
  }

  std::ostringstream csv;
  csv << "family,n,p,mode,solved,avg_nodes,avg_time\n";
  std::printf("%-8s %4s %4s %-5s %7s %10s %10s\n", "family", "n", "p", "mode",
              "solved", "avg_nodes", "avg_time");
  for (const auto& r : rows) {
    // averages over solved instances only
    const double an = r.solved ? r.sum_nodes / r.solved : 0.0;
    const double at = r.solved ? r.sum_time / r.solved : 0.0;
    csv << r.family << "," << r.n << "," << r.p << "," << r.mode << ","
        << r.solved << "," << an << "," << at << "\n";
    std::printf("%-8s %4d %4d %-5s %3d/%-3d %10.2f %10.3f\n", r.family.c_str(),
                r.n, r.p, r.mode.c_str(), r.solved, r.total, an, at);
  }
  if (!f.csv_path.empty()) {
    std::ofstream out(f.csv_path);
    out << csv.str();
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch-and-bound solver for integer quadratic programs"};
  app.require_subcommand(1);

  SolveFlags sf;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  solve_cmd->add_option("path", sf.path, "instance file")->required();
  solve_cmd->add_option("--mode", sf.mode, "cd or cd2d")
      ->check(CLI::IsMember({"cd", "cd2d"}));
  solve_cmd->add_option("--gap", sf.gap, "relative gap-progress threshold");
  solve_cmd->add_option("--opt-eps", sf.opt_eps, "optimality tolerance");
  solve_cmd->add_option("--node-limit", sf.node_limit, "node budget");
  solve_cmd->add_option("--time-limit", sf.time_limit, "seconds, 0 = off");
  solve_cmd->add_option("--seed", sf.seed, "reserved; kept for symmetry");
  solve_cmd->add_flag("--json", sf.as_json, "machine-readable output");

  GenerateFlags gf;
  auto* gen_cmd = app.add_subcommand("generate", "write random instances");
  gen_cmd->add_option("--family", gf.family, "dense, sparse, or lowrank");
  gen_cmd->add_option("--n", gf.n, "variables");
  gen_cmd->add_option("--p", gf.p, "family percentage parameter");
  gen_cmd->add_option("--count", gf.count, "number of instances");
  gen_cmd->add_option("--seed", gf.seed, "base seed");
  gen_cmd->add_option("--domain", gf.domain, "ternary, box, or custom");
  gen_cmd->add_option("--lo", gf.lo, "custom/box lower bound");
  gen_cmd->add_option("--hi", gf.hi, "custom/box upper bound");
  gen_cmd->add_option("--constraint", gf.constraint,
                      "none, sum, or knapsack");
  gen_cmd->add_option("--out-dir", gf.out_dir, "output directory");
  gen_cmd->add_option("--prefix", gf.prefix, "file name prefix");

  BenchFlags bf;
  auto* bench_cmd = app.add_subcommand("bench", "benchmark sweep");
  bench_cmd->add_option("--family", bf.family, "dense, sparse, or lowrank");
  bench_cmd->add_option("--n", bf.ns, "variable counts (repeatable)");
  bench_cmd->add_option("--count", bf.count, "instances per p value");
  bench_cmd->add_option("--mode", bf.mode, "cd, cd2d, or both")
      ->check(CLI::IsMember({"cd", "cd2d", "both"}));
  bench_cmd->add_option("--time-limit", bf.time_limit, "seconds/instance");
  bench_cmd->add_option("--seed", bf.seed, "base seed");
  bench_cmd->add_option("--domain", bf.domain, "ternary, box, or custom");
  bench_cmd->add_option("--constraint", bf.constraint,
                        "none, sum, or knapsack");
  bench_cmd->add_option("--csv", bf.csv_path, "write CSV to this file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve_cmd->parsed()) return run_solve(sf);
    if (gen_cmd->parsed()) return run_generate(gf);
    return run_bench(bf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
