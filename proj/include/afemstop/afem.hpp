#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afemstop/algebraic.hpp"
#include "afemstop/equilibration.hpp"
#include "afemstop/problems.hpp"
#include "afemstop/solvers.hpp"

namespace afemstop {

struct SolverDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StoppingConfig {
  double tol = 0.67;
  double tol_rho = 0.1;
  int check_every = 3;
  int exact_solve_dof_threshold = 500;
  double dorfler_theta = 0.5;
  int max_cycles = 30;
  int max_iterations_per_level = 100000;
};

/// eta_a < tol * eta_d together with a settled rate estimate.
bool stopping_check(double eta_a, double eta_d, double rho_k, double rho_km1,
                    const StoppingConfig& cfg);

/// Minimal greedy bulk set with sum of squared indicators >= theta * total;
/// ties broken by ascending element index.
std::vector<int> dorfler_mark(const Vec& indicators, double theta);

struct CycleRecord {
  int level = 0;
  int dof = 0;
  double eta_d = 0.0;
  double eta_a = 0.0;   // 0 on exactly solved levels
  int stop_iter = 0;    // 0 on exactly solved levels
  double error = -1.0;  // energy error vs exact solution; -1 when unknown
  double algebraic_error = 0.0;  // vs a direct-solve reference
  double effectivity = 0.0;
  double rel_error = -1.0;
};

/// -slope of the least-squares fit of log(error) against log(dof);
/// needs at least three records with positive errors.
double fit_convergence_rate(const std::vector<CycleRecord>& records);

enum class SolverKind { direct, mg_v11, sgs };
enum class StopMode { estimator, relres };

SolverKind solver_by_name(const std::string& name);

struct RunOptions {
  SolverKind solver = SolverKind::mg_v11;
  StopMode stop = StopMode::estimator;
  double relres = 1e-7;
  StoppingConfig cfg;
  std::uint64_t seed = 42;
  double target_rel_error = 0.0;  // 0 disables the error-based exit
  bool single_level = false;      // no marking/refinement, solver study only
  int check_every_single_level = 1;
};

struct TraceRow {
  int k = 0;
  double res = 0.0;
  double rho = 0.0;      // 0 when undefined
  double rho_hat = 0.0;  // 0 when undefined
  double du_A = 0.0;
  double eta_a = 0.0;    // 0 when undefined/deferred
};

struct LevelResult {
  CycleRecord record;
  std::vector<TraceRow> trace;
  Vec indicators;           // eta_{d,K} at the final iterate
  P1Function final_iterate; // nodal values including boundary data
};

struct RunResult {
  std::vector<LevelResult> levels;
  std::vector<TriMesh> meshes;       // full hierarchy including pre-doublings
  int first_experiment_level = 0;    // index into meshes of the first record
  double exact_energy_norm = 0.0;
};

/// ITERATE -> ESTIMATE (-> MARK -> REFINE) driver. Levels below the dof
/// threshold (or with solver = direct) use the exact solve; the others run
/// the iterative solver with the estimator-based stopping rule or a relative
/// residual test. Single-level mode skips marking and checks only the
/// eta_a < tol * eta_d condition, every iteration.
RunResult run_inexact_afem(const BenchmarkProblem& problem, const RunOptions& opts);

}  // namespace afemstop
