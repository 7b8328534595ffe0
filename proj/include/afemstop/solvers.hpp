#pragma once

#include <cstdint>
#include <memory>

#include "afemstop/fem.hpp"
#include "afemstop/linalg.hpp"
#include "afemstop/mesh.hpp"

namespace afemstop {

/// One application of the symmetric operator B of a linear iteration
/// u <- u + B (f - A u).
class IterativeSolver {
 public:
  virtual ~IterativeSolver() = default;
  virtual Vec apply(const Vec& r) const = 0;
  virtual int dim() const = 0;
};

/// Forward then backward Gauss-Seidel: B = (L+D)^{-T} D (L+D)^{-1}.
class SgsSolver final : public IterativeSolver {
 public:
  explicit SgsSolver(const SparseSpd& A);
  Vec apply(const Vec& r) const override;
  int dim() const override { return A_->n; }

 private:
  const SparseSpd* A_;
};

// x <- x updated by one sweep on A x = b
void forward_gs_sweep(const SparseSpd& A, Vec& x, const Vec& b);
void backward_gs_sweep(const SparseSpd& A, Vec& x, const Vec& b);

/// Prolongation between the interior unknowns of two nested meshes; at most
/// two coarse contributions per fine row (P1 nodal interpolation).
struct InteriorProlong {
  int n_coarse = 0;
  std::vector<std::array<int, 2>> idx;    // -1 entries are absent
  std::vector<std::array<double, 2>> w;

  Vec apply(const Vec& coarse) const;
  Vec apply_transpose(const Vec& fine) const;
};

InteriorProlong make_interior_prolong(const NodalInterp& interp,
                                      const DirichletSystem& coarse,
                                      const DirichletSystem& fine);

/// Geometric multigrid V(1,1)-cycle: one forward-GS pre-smoothing, coarse
/// correction by the transpose prolongation, one backward-GS post-smoothing.
/// The coarsest level is solved directly, so B is symmetric.
class Multigrid final : public IterativeSolver {
 public:
  struct Level {
    SparseSpd A;
    InteriorProlong P;  // from the level below; unused at level 0
  };

  explicit Multigrid(std::vector<Level> levels);
  Vec apply(const Vec& r) const override;
  int dim() const override { return levels_.back().A.n; }
  int num_levels() const { return static_cast<int>(levels_.size()); }

 private:
  Vec cycle(int level, const Vec& r) const;

  std::vector<Level> levels_;
  std::unique_ptr<CholeskyFactor> coarse_;
};

/// u + B (f - A u)
Vec iterate(const IterativeSolver& solver, const SparseSpd& A, const Vec& f, const Vec& u);

/// Spectral radius of I - B A by power iteration on the error propagation,
/// with the extrapolated ratio estimate as the convergence accelerator.
/// Test oracle; throws if the iteration fails to settle.
double spectral_radius_oracle(const IterativeSolver& solver, const SparseSpd& A,
                              std::uint64_t seed = 7, double tol = 1e-8,
                              int max_iter = 200000);

/// splitmix64 stream; entries uniform in [-1, 1), identical for equal seeds
/// on every platform.
Vec random_initial_guess(int n, std::uint64_t seed);

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double next_unit();  // [-1, 1)
};

}  // namespace afemstop
