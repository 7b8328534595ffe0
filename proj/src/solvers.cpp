#include "afemstop/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace afemstop {

namespace {

double diag_entry(const SparseSpd& A, int i) {
  for (int k = A.rowptr[i]; k < A.rowptr[i + 1]; ++k)
    if (A.col[k] == i) return A.val[k];
  return 0.0;
}

}  // namespace

void forward_gs_sweep(const SparseSpd& A, Vec& x, const Vec& b) {
  for (int i = 0; i < A.n; ++i) {
    double s = b[i];
    double d = 0.0;
    for (int k = A.rowptr[i]; k < A.rowptr[i + 1]; ++k) {
      const int j = A.col[k];
      if (j == i)
        d = A.val[k];
      else
        s -= A.val[k] * x[j];
    }
    x[i] = s / d;
  }
}

void backward_gs_sweep(const SparseSpd& A, Vec& x, const Vec& b) {
  for (int i = A.n - 1; i >= 0; --i) {
    double s = b[i];
    double d = 0.0;
    for (int k = A.rowptr[i]; k < A.rowptr[i + 1]; ++k) {
      const int j = A.col[k];
      if (j == i)
        d = A.val[k];
      else
        s -= A.val[k] * x[j];
    }
    x[i] = s / d;
  }
}

SgsSolver::SgsSolver(const SparseSpd& A) : A_(&A) {
  for (int i = 0; i < A.n; ++i)
    if (diag_entry(A, i) == 0.0)
      throw std::invalid_argument("SgsSolver: zero diagonal entry");
}

Vec SgsSolver::apply(const Vec& r) const {
  Vec x(A_->n, 0.0);
  forward_gs_sweep(*A_, x, r);
  backward_gs_sweep(*A_, x, r);
  return x;
}

Vec InteriorProlong::apply(const Vec& coarse) const {
  Vec fine(idx.size(), 0.0);
  for (size_t i = 0; i < idx.size(); ++i) {
    double s = 0.0;
    if (idx[i][0] >= 0) s += w[i][0] * coarse[idx[i][0]];
    if (idx[i][1] >= 0) s += w[i][1] * coarse[idx[i][1]];
    fine[i] = s;
  }
  return fine;
}

Vec InteriorProlong::apply_transpose(const Vec& fine) const {
  Vec coarse(n_coarse, 0.0);
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i][0] >= 0) coarse[idx[i][0]] += w[i][0] * fine[i];
    if (idx[i][1] >= 0) coarse[idx[i][1]] += w[i][1] * fine[i];
  }
  return coarse;
}

InteriorProlong make_interior_prolong(const NodalInterp& interp,
                                      const DirichletSystem& coarse,
                                      const DirichletSystem& fine) {
  InteriorProlong p;
  p.n_coarse = coarse.dof();
  p.idx.assign(fine.dof(), {-1, -1});
  p.w.assign(fine.dof(), {0.0, 0.0});
  for (int i = 0; i < fine.dof(); ++i) {
    const int v = fine.interior_vertices[i];
    const auto [a, b] = interp.parents[v];
    if (b < 0) {
      const int ci = coarse.vertex_to_interior[a];
      if (ci >= 0) {
        p.idx[i][0] = ci;
        p.w[i][0] = 1.0;
      }
    } else {
      const int ca = coarse.vertex_to_interior[a];
      const int cb = coarse.vertex_to_interior[b];
      if (ca >= 0) {
        p.idx[i][0] = ca;
        p.w[i][0] = 0.5;
      }
      if (cb >= 0) {
        p.idx[i][1] = cb;
        p.w[i][1] = 0.5;
      }
    }
  }
  return p;
}

Multigrid::Multigrid(std::vector<Level> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("Multigrid: no levels");
  for (size_t l = 1; l < levels_.size(); ++l) {
    if (static_cast<int>(levels_[l].P.idx.size()) != levels_[l].A.n ||
        levels_[l].P.n_coarse != levels_[l - 1].A.n)
      throw DimensionError("Multigrid: inconsistent hierarchy dimensions");
  }
  coarse_ = std::make_unique<CholeskyFactor>(levels_[0].A);
}

Vec Multigrid::cycle(int level, const Vec& r) const {
  if (level == 0) return coarse_->solve(r);
  const SparseSpd& A = levels_[level].A;
  Vec x(A.n, 0.0);
  forward_gs_sweep(A, x, r);
  const Vec res = subtract(r, A.multiply(x));
  const Vec rc = levels_[level].P.apply_transpose(res);
  const Vec ec = cycle(level - 1, rc);
  const Vec ef = levels_[level].P.apply(ec);
  for (int i = 0; i < A.n; ++i) x[i] += ef[i];
  backward_gs_sweep(A, x, r);
  return x;
}

Vec Multigrid::apply(const Vec& r) const {
  return cycle(static_cast<int>(levels_.size()) - 1, r);
}

Vec iterate(const IterativeSolver& solver, const SparseSpd& A, const Vec& f, const Vec& u) {
  if (A.n != solver.dim() || static_cast<int>(f.size()) != A.n ||
      static_cast<int>(u.size()) != A.n)
    throw DimensionError("iterate: size mismatch");
  const Vec r = subtract(f, A.multiply(u));
  const Vec du = solver.apply(r);
  Vec next = u;
  for (int i = 0; i < A.n; ++i) next[i] += du[i];
  return next;
}

double spectral_radius_oracle(const IterativeSolver& solver, const SparseSpd& A,
                              std::uint64_t seed, double tol, int max_iter) {
  Vec e = random_initial_guess(A.n, seed);
  const double n0 = norm2(e);
  for (int i = 0; i < A.n; ++i) e[i] /= n0;
  double prev_ratio = 0.0, prev_accel = -1.0;
  double ratio = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    const Vec be = solver.apply(A.multiply(e));
    double norm_next = 0.0;
    for (int i = 0; i < A.n; ++i) {
      e[i] -= be[i];
      norm_next += e[i] * e[i];
    }
    norm_next = std::sqrt(norm_next);
    if (norm_next < 1e-14) return norm_next;  // one-step exact solver
    ratio = norm_next;  // previous iterate was normalized to 1
    for (int i = 0; i < A.n; ++i) e[i] /= norm_next;
    if (k >= 3 && prev_ratio > 0.0) {
      const double accel = ratio * ratio / prev_ratio;
      if (prev_accel >= 0.0 && std::abs(accel - prev_accel) < tol)
        return accel;
      prev_accel = accel;
    }
    prev_ratio = ratio;
  }
  throw std::runtime_error("spectral_radius_oracle: no convergence (solver may not contract)");
}

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97f4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

Vec random_initial_guess(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_unit();
  return v;
}

}  // namespace afemstop
