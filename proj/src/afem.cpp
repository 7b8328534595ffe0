#include "afemstop/afem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace afemstop {

bool stopping_check(double eta_a_v, double eta_d_v, double rho_k_v, double rho_km1_v,
                    const StoppingConfig& cfg) {
  if (rho_km1_v <= 0.0) return false;
  const bool small_algebraic = eta_a_v < cfg.tol * eta_d_v;
  const bool settled_rate = std::abs(rho_k_v / rho_km1_v - 1.0) < cfg.tol_rho;
  return small_algebraic && settled_rate;
}

std::vector<int> dorfler_mark(const Vec& indicators, double theta) {
  if (theta <= 0.0 || theta > 1.0)
    throw std::invalid_argument("dorfler_mark: theta must be in (0, 1]");
  const int n = static_cast<int>(indicators.size());
  double total = 0.0;
  for (double v : indicators) {
    if (v < 0.0) throw std::invalid_argument("dorfler_mark: negative indicator");
    total += v * v;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return indicators[a] != indicators[b] ? indicators[a] > indicators[b] : a < b;
  });
  std::vector<int> marked;
  if (total == 0.0) return marked;
  double acc = 0.0;
  for (int t : order) {
    if (acc >= theta * total) break;
    if (indicators[t] == 0.0) break;
    marked.push_back(t);
    acc += indicators[t] * indicators[t];
  }
  return marked;
}

double fit_convergence_rate(const std::vector<CycleRecord>& records) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records)
    if (r.error > 0.0 && r.dof > 0) pts.emplace_back(std::log(r.dof), std::log(r.error));
  if (pts.size() < 3)
    throw std::invalid_argument("fit_convergence_rate: need at least 3 levels with errors");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = pts.size();
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

SolverKind solver_by_name(const std::string& name) {
  if (name == "direct") return SolverKind::direct;
  if (name == "mg-v11") return SolverKind::mg_v11;
  if (name == "sgs") return SolverKind::sgs;
  throw std::invalid_argument("unknown solver: " + name);
}

namespace {

struct LevelSetup {
  PwConstField A_coef;
  PwConstField f_proj;
  DirichletSystem sys;
};

LevelSetup make_level(const BenchmarkProblem& pb, const TriMesh& mesh) {
  LevelSetup ls;
  ls.A_coef = pw_constant_coefficient(mesh, pb.diffusion, pb.coefficient_has_interfaces);
  ls.f_proj = project_element_average(mesh, pb.source);
  const SparseSpd stiff = assemble_stiffness(mesh, ls.A_coef);
  const Vec load = assemble_load(mesh, ls.f_proj);
  P1Function g(mesh.num_vertices(), 0.0);
  if (pb.has_exact)
    for (int v = 0; v < mesh.num_vertices(); ++v)
      if (mesh.vert_boundary[v]) g[v] = pb.exact(mesh.vertices[v]);
  ls.sys = apply_dirichlet(stiff, load, mesh, g);
  return ls;
}

ErrorQuadOpts quad_opts(const BenchmarkProblem& pb) {
  ErrorQuadOpts q;
  q.has_singularity = pb.has_singularity;
  q.singular_point = pb.singular_point;
  q.singular_subdivisions = pb.has_singularity ? 4 : 0;
  return q;
}

}  // namespace

RunResult run_inexact_afem(const BenchmarkProblem& pb, const RunOptions& opts) {
  RunResult rr;
  rr.exact_energy_norm = pb.exact_energy_norm;

  rr.meshes.push_back(build_uniform_mesh(pb.domain, pb.initial_n));
  std::vector<NodalInterp> interps;  // interps[l] maps mesh l -> mesh l+1
  {
    int n = pb.initial_n;
    for (int d = 0; d < pb.pre_doublings; ++d) {
      rr.meshes.push_back(build_uniform_mesh(pb.domain, 2 * n));
      interps.push_back(uniform_grid_interp(n));
      n *= 2;
    }
  }
  std::vector<LevelSetup> setups;
  setups.reserve(rr.meshes.size());
  for (const auto& mesh : rr.meshes) setups.push_back(make_level(pb, mesh));

  // grade the starting mesh (exact solves, uncounted cycles) until the
  // configured unknown count is reached
  while (pb.pre_adapt_min_dof > 0 && setups.back().sys.dof() < pb.pre_adapt_min_dof) {
    const TriMesh& mesh = rr.meshes.back();
    const LevelSetup& ls = setups.back();
    const Vec u_int = CholeskyFactor(ls.sys.A).solve(ls.sys.rhs);
    const Equilibration eq = equilibrate(mesh, ls.A_coef, ls.f_proj, ls.sys.expand(u_int));
    const EtaD ed = eta_d(mesh, ls.A_coef, eq.sigma);
    const std::vector<int> marked = dorfler_mark(ed.per_element, opts.cfg.dorfler_theta);
    if (marked.empty()) break;
    TriMesh refined = bisect(mesh, marked);
    interps.push_back(bisection_interp(refined));
    rr.meshes.push_back(std::move(refined));
    setups.push_back(make_level(pb, rr.meshes.back()));
  }

  rr.first_experiment_level = static_cast<int>(rr.meshes.size()) - 1;

  P1Function prev_final;  // final iterate on the previous level
  int cycle_count = 0;

  while (true) {
    const int li = static_cast<int>(rr.meshes.size()) - 1;
    const TriMesh& mesh = rr.meshes[li];
    const LevelSetup& ls = setups[li];
    const int dof = ls.sys.dof();

    LevelResult lr;
    lr.record.level = cycle_count;
    lr.record.dof = dof;

    const bool exact_level =
        opts.solver == SolverKind::direct || dof < opts.cfg.exact_solve_dof_threshold;

    Vec u_int;
    IterationTrace trace;
    std::optional<EtaD> eta_at_stop;
    double eta_a_at_stop = 0.0;
    int stop_iter = 0;

    if (exact_level) {
      u_int = CholeskyFactor(ls.sys.A).solve(ls.sys.rhs);
    } else {
      std::unique_ptr<IterativeSolver> solver;
      if (opts.solver == SolverKind::sgs) {
        solver = std::make_unique<SgsSolver>(ls.sys.A);
      } else {
        std::vector<Multigrid::Level> levels;
        levels.push_back({setups[0].sys.A, {}});
        for (int l = 1; l <= li; ++l)
          levels.push_back({setups[l].sys.A,
                            make_interior_prolong(interps[l - 1], setups[l - 1].sys, setups[l].sys)});
        solver = std::make_unique<Multigrid>(std::move(levels));
      }

      if (prev_final.empty()) {
        u_int = random_initial_guess(dof, opts.seed);
      } else {
        const Vec carried = interps[li - 1].apply(prev_final);
        u_int = ls.sys.restrict_interior(carried);
      }

      trace.res.push_back(norm2(subtract(ls.sys.rhs, ls.sys.A.multiply(u_int))));
      trace.du_A.push_back(0.0);
      const double res0 = trace.res[0];

      int growth_streak = 0;
      bool stopped = false;
      const int check_every = opts.single_level ? opts.check_every_single_level
                                                : opts.cfg.check_every;
      for (int k = 1; k <= opts.cfg.max_iterations_per_level; ++k) {
        const Vec u_next = iterate(*solver, ls.sys.A, ls.sys.rhs, u_int);
        trace.du_A.push_back(norm_A(ls.sys.A, subtract(u_next, u_int)));
        u_int = u_next;
        const double res = norm2(subtract(ls.sys.rhs, ls.sys.A.multiply(u_int)));
        trace.res.push_back(res);

        TraceRow row;
        row.k = k;
        row.res = res;
        row.du_A = trace.du_A[k];
        if (k >= 1 && trace.res[k - 1] > 0.0) {
          const Rate r = rho_k(trace, k);
          if (r.status == RateStatus::ok) row.rho = r.value;
        }
        if (k >= 2) {
          const Rate rh = rho_hat_k(trace, k);
          if (rh.status == RateStatus::ok) row.rho_hat = rh.value;
          const Rate ea = eta_a(trace, k);
          if (ea.status == RateStatus::ok) row.eta_a = ea.value;
        }
        lr.trace.push_back(row);

        if (res > trace.res[k - 1])
          ++growth_streak;
        else
          growth_streak = 0;
        if (growth_streak >= 20)
          throw SolverDivergence("solver diverged: residual grew over 20 consecutive checks");

        if (res == 0.0) {
          stop_iter = k;
          stopped = true;
          break;
        }

        if (opts.stop == StopMode::relres) {
          if (res0 == 0.0 || res / res0 <= opts.relres) {
            stop_iter = k;
            stopped = true;
            if (k >= 2) {
              const Rate ea = eta_a(trace, k);
              if (ea.status == RateStatus::ok) eta_a_at_stop = ea.value;
            }
            break;
          }
          continue;
        }

        // estimator-based stopping
        if (k < 2 || k % check_every != 0) continue;
        const Rate ea = eta_a(trace, k);
        if (ea.status == RateStatus::converged) {
          stop_iter = k;
          stopped = true;
          break;
        }
        if (ea.status != RateStatus::ok) continue;  // defer

        const P1Function u_full = ls.sys.expand(u_int);
        const Equilibration eq = equilibrate(mesh, ls.A_coef, ls.f_proj, u_full);
        const EtaD ed = eta_d(mesh, ls.A_coef, eq.sigma);

        bool fire;
        if (opts.single_level) {
          fire = ea.value < opts.cfg.tol * ed.global;
        } else {
          const Rate rk = rho_k(trace, k);
          const Rate rkm = rho_k(trace, k - 1);
          fire = rk.status == RateStatus::ok && rkm.status == RateStatus::ok &&
                 stopping_check(ea.value, ed.global, rk.value, rkm.value, opts.cfg);
        }
        if (fire) {
          stop_iter = k;
          eta_a_at_stop = ea.value;
          eta_at_stop = ed;
          stopped = true;
          break;
        }
      }
      if (!stopped) {
        stop_iter = trace.last_iteration();
        if (stop_iter >= 2) {
          const Rate ea = eta_a(trace, stop_iter);
          if (ea.status == RateStatus::ok) eta_a_at_stop = ea.value;
        }
      }
    }

    const P1Function u_full = ls.sys.expand(u_int);
    if (!eta_at_stop) {
      const Equilibration eq = equilibrate(mesh, ls.A_coef, ls.f_proj, u_full);
      eta_at_stop = eta_d(mesh, ls.A_coef, eq.sigma);
    }

    lr.record.stop_iter = stop_iter;
    lr.record.eta_a = eta_a_at_stop;
    lr.record.eta_d = eta_at_stop->global;
    lr.indicators = eta_at_stop->per_element;
    if (!exact_level) {
      const Vec u_ref = CholeskyFactor(ls.sys.A).solve(ls.sys.rhs);
      lr.record.algebraic_error = norm_A(ls.sys.A, subtract(u_int, u_ref));
    }
    if (pb.has_exact) {
      lr.record.error = energy_error_vs_exact(mesh, ls.A_coef, pb.exact_grad, u_full,
                                              quad_opts(pb));
      if (lr.record.error > 0.0) lr.record.effectivity = lr.record.eta_d / lr.record.error;
      if (pb.exact_energy_norm > 0.0)
        lr.record.rel_error = lr.record.error / pb.exact_energy_norm;
    }
    lr.final_iterate = u_full;
    rr.levels.push_back(std::move(lr));

    if (opts.single_level) break;
    if (pb.has_exact && opts.target_rel_error > 0.0 &&
        rr.levels.back().record.rel_error >= 0.0 &&
        rr.levels.back().record.rel_error < opts.target_rel_error)
      break;
    if (cycle_count >= opts.cfg.max_cycles) break;
    if (rr.levels.back().record.eta_d <= 1e-14) break;  // solution already exact

    const std::vector<int> marked =
        dorfler_mark(rr.levels.back().indicators, opts.cfg.dorfler_theta);
    if (marked.empty()) break;
    TriMesh refined = bisect(mesh, marked);
    interps.push_back(bisection_interp(refined));
    rr.meshes.push_back(std::move(refined));
    setups.push_back(make_level(pb, rr.meshes.back()));
    prev_final = u_full;
    ++cycle_count;
  }

  return rr;
}

}  // namespace afemstop
