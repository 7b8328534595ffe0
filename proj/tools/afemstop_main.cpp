// Command-line front end: runs the benchmark problems with the
// estimator-based or relative-residual stopping rule and writes
// machine-readable CSV results.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "afemstop/afem.hpp"

namespace fs = std::filesystem;
using namespace afemstop;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CliConfig {
  std::string problem = "example1";
  std::string solver;
  std::string stop = "estimator";
  std::string out = ".";
  double tol = 0.67;
  double tol_rho = 0.1;
  int check_every = 0;  // 0: per-mode default (3 for AFEM cycles, 1 single-level)
  int dof_exact = 500;
  double theta = 0.5;
  std::uint64_t seed = 42;
  double relres = 1e-7;
  int max_cycles = 30;
  double target_rel_error = 0.0;
};

std::string default_solver(const std::string& problem) {
  return problem == "example2" ? "sgs" : "mg-v11";
}

RunOptions make_options(const CliConfig& c, bool force_exact) {
  RunOptions o;
  o.solver = force_exact ? SolverKind::direct : solver_by_name(c.solver);
  o.stop = c.stop == "relres" ? StopMode::relres : StopMode::estimator;
  o.relres = c.relres;
  o.cfg.tol = c.tol;
  o.cfg.tol_rho = c.tol_rho;
  o.cfg.check_every = c.check_every > 0 ? c.check_every : 3;
  o.cfg.exact_solve_dof_threshold = c.dof_exact;
  o.cfg.dorfler_theta = c.theta;
  o.cfg.max_cycles = c.max_cycles;
  o.seed = c.seed;
  o.target_rel_error = c.target_rel_error;
  return o;
}

void write_trace_csv(const fs::path& path, const RunResult& rr) {
  std::ofstream os(path);
  os << "level,k,res_norm,rho,rho_hat,du_norm_A,eta_a\n";
  for (const auto& lv : rr.levels)
    for (const auto& row : lv.trace)
      os << lv.record.level << ',' << row.k << ',' << fmt(row.res) << ',' << fmt(row.rho)
         << ',' << fmt(row.rho_hat) << ',' << fmt(row.du_A) << ',' << fmt(row.eta_a) << '\n';
}

void write_cycles_csv(const fs::path& path, const RunResult& rr) {
  std::ofstream os(path);
  os << "m,dof,eta_d,eta_a,stop_iter,error,effectivity\n";
  for (const auto& lv : rr.levels) {
    const auto& r = lv.record;
    os << r.level << ',' << r.dof << ',' << fmt(r.eta_d) << ',' << fmt(r.eta_a) << ','
       << r.stop_iter << ',' << fmt(r.error) << ',' << fmt(r.effectivity) << '\n';
  }
}

void write_indicators_csv(const fs::path& dir, const RunResult& rr) {
  for (const auto& lv : rr.levels) {
    std::ofstream os(dir / ("indicators_" + std::to_string(lv.record.level) + ".csv"));
    os << "element,eta_d_K\n";
    for (size_t t = 0; t < lv.indicators.size(); ++t)
      os << t << ',' << fmt(lv.indicators[t]) << '\n';
  }
}

void write_meshes(const fs::path& dir, const RunResult& rr) {
  for (size_t i = 0; i < rr.levels.size(); ++i) {
    const int mesh_index = rr.first_experiment_level + static_cast<int>(i);
    std::ofstream os(dir / ("mesh_" + std::to_string(rr.levels[i].record.level) + ".txt"));
    write_mesh_text(os, rr.meshes[mesh_index]);
  }
}

void print_summary(const BenchmarkProblem& pb, const CliConfig& c, const RunResult& rr) {
  std::printf("problem=%s solver=%s stop=%s\n", pb.name.c_str(), c.solver.c_str(),
              c.stop.c_str());
  std::printf("%4s %8s %6s %12s %12s %12s %12s\n", "m", "dof", "iter", "eta_d", "eta_a",
              "error", "alg_error");
  for (const auto& lv : rr.levels) {
    const auto& r = lv.record;
    std::printf("%4d %8d %6d %12.5g %12.5g %12.5g %12.5g\n", r.level, r.dof, r.stop_iter,
                r.eta_d, r.eta_a, r.error, r.algebraic_error);
  }
  if (rr.levels.size() >= 3) {
    try {
      std::printf("rate r = %.5g\n", fit_convergence_rate([&] {
                    std::vector<CycleRecord> recs;
                    for (const auto& lv : rr.levels) recs.push_back(lv.record);
                    return recs;
                  }()));
    } catch (const std::exception&) {
    }
  }
  const auto& last = rr.levels.back().record;
  if (last.error >= 0.0)
    std::printf("final: error=%.5g rel_error=%.5g effectivity=%.5g\n", last.error,
                last.rel_error, last.effectivity);
}

int cmd_run(const CliConfig& c) {
  const BenchmarkProblem pb = problem_by_name(c.problem);
  CliConfig cfg = c;
  if (cfg.solver.empty()) cfg.solver = default_solver(c.problem);

  RunOptions opts = make_options(cfg, false);
  if (pb.name == "example1" || pb.name == "example2") {
    opts.single_level = true;
    opts.check_every_single_level = cfg.check_every > 0 ? cfg.check_every : 1;
  } else if (opts.target_rel_error == 0.0) {
    opts.target_rel_error = 0.01;
  }

  fs::create_directories(cfg.out);
  const RunResult rr = run_inexact_afem(pb, opts);
  write_trace_csv(fs::path(cfg.out) / "trace.csv", rr);
  write_cycles_csv(fs::path(cfg.out) / "cycles.csv", rr);
  write_indicators_csv(cfg.out, rr);
  write_meshes(cfg.out, rr);
  print_summary(pb, cfg, rr);
  return 0;
}

int cmd_compare(const CliConfig& c, const std::string& vs_problem) {
  if (!vs_problem.empty() && vs_problem != c.problem)
    throw CLI::ValidationError("compare requires matching problems on both sides");
  const BenchmarkProblem pb = problem_by_name(c.problem);
  CliConfig cfg = c;
  if (cfg.solver.empty()) cfg.solver = default_solver(c.problem);
  if (cfg.target_rel_error == 0.0) cfg.target_rel_error = 0.01;

  fs::create_directories(cfg.out);

  struct Row {
    std::string mode;
    double r, eps, rel;
    int m, dof;
  };
  std::vector<Row> rows;
  for (const bool exact : {true, false}) {
    RunOptions opts = make_options(cfg, exact);
    opts.target_rel_error = cfg.target_rel_error;
    const RunResult rr = run_inexact_afem(pb, opts);
    std::vector<CycleRecord> recs;
    for (const auto& lv : rr.levels) recs.push_back(lv.record);
    const auto& last = recs.back();
    rows.push_back({exact ? "exact" : "inexact", fit_convergence_rate(recs),
                    last.effectivity, last.rel_error, last.level, last.dof});
    const std::string prefix = exact ? "exact_" : "inexact_";
    write_trace_csv(fs::path(cfg.out) / (prefix + "trace.csv"), rr);
    write_cycles_csv(fs::path(cfg.out) / (prefix + "cycles.csv"), rr);
  }

  std::ofstream os(fs::path(cfg.out) / "compare.csv");
  os << "mode,r,effectivity,m,dof,rel_error\n";
  std::printf("%-8s %10s %12s %4s %8s %12s\n", "mode", "r", "effectivity", "m", "dof",
              "rel_error");
  for (const auto& row : rows) {
    os << row.mode << ',' << fmt(row.r) << ',' << fmt(row.eps) << ',' << row.m << ','
       << row.dof << ',' << fmt(row.rel) << '\n';
    std::printf("%-8s %10.5g %12.5g %4d %8d %12.5g\n", row.mode.c_str(), row.r, row.eps,
                row.m, row.dof, row.rel);
  }
  return 0;
}

int cmd_mesh_io(const std::string& in, const std::string& out) {
  std::ifstream is(in);
  if (!is) throw CLI::ValidationError("cannot open mesh file: " + in);
  const TriMesh mesh = read_mesh_text(is);
  const std::string violation = conformity_violation(mesh);
  std::printf("ntri=%d nvert=%d nfaces=%d conforming=%s min_angle_deg=%.6g\n",
              mesh.num_tris(), mesh.num_vertices(), mesh.num_faces(),
              violation.empty() ? "yes" : violation.c_str(),
              mesh.min_angle() * 180.0 / 3.14159265358979323846);
  if (!out.empty()) {
    std::ofstream os(out);
    write_mesh_text(os, mesh);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Adaptive FEM driver with equilibrated-flux total-error estimation and an "
      "algebraic stopping criterion.\n"
      "CSV schemas:\n"
      "  trace.csv:   level,k,res_norm,rho,rho_hat,du_norm_A,eta_a\n"
      "  cycles.csv:  m,dof,eta_d,eta_a,stop_iter,error,effectivity\n"
      "  indicators_<m>.csv: element,eta_d_K\n"
      "  compare.csv: mode,r,effectivity,m,dof,rel_error\n"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::string vs_problem;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--problem", cfg.problem, "example1 | example2 | kellogg");
    cmd->add_option("--solver", cfg.solver, "mg-v11 | sgs | direct");
    cmd->add_option("--tol", cfg.tol, "stopping tolerance for eta_a < tol*eta_d");
    cmd->add_option("--tol-rho", cfg.tol_rho, "rate-drift tolerance");
    cmd->add_option("--check-every", cfg.check_every, "iterations between stopping checks");
    cmd->add_option("--dof-exact", cfg.dof_exact, "direct solve below this dof count");
    cmd->add_option("--theta", cfg.theta, "Dorfler bulk fraction");
    cmd->add_option("--seed", cfg.seed, "random initial guess seed");
    cmd->add_option("--stop", cfg.stop, "estimator | relres")
        ->check(CLI::IsMember({"estimator", "relres"}));
    cmd->add_option("--relres", cfg.relres, "relative residual threshold");
    cmd->add_option("--max-cycles", cfg.max_cycles, "AFEM cycle cap");
    cmd->add_option("--target-rel-error", cfg.target_rel_error, "relative energy error target");
    cmd->add_option("--out", cfg.out, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "run one problem/solver configuration");
  add_common(run);
  CLI::App* compare =
      app.add_subcommand("compare", "run exact and inexact AFEM on the same problem");
  add_common(compare);
  compare->add_option("--vs-problem", vs_problem, "must match --problem");

  std::string mesh_in, mesh_out;
  CLI::App* meshio = app.add_subcommand("mesh-io", "validate/convert the mesh text format");
  meshio->add_option("--in", mesh_in, "input mesh file")->required();
  meshio->add_option("--out", mesh_out, "optional re-exported copy");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(cfg);
    if (compare->parsed()) return cmd_compare(cfg, vs_problem);
    if (meshio->parsed()) return cmd_mesh_io(mesh_in, mesh_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
