#pragma once

#include <vector>

#include "afemstop/linalg.hpp"

namespace afemstop {

/// Per-level solver history: residual 2-norms ||r_k|| for k = 0.. and A-norm
/// increments ||u^(k) - u^(k-1)||_A for k = 1.. (du_A[0] is unused).
struct IterationTrace {
  std::vector<double> res;
  std::vector<double> du_A;

  int last_iteration() const { return static_cast<int>(res.size()) - 1; }
};

enum class RateStatus {
  ok,
  converged,  // previous residual already zero
  defer       // rate estimate unusable this step (ratio >= 1 or undefined)
};

struct Rate {
  RateStatus status = RateStatus::defer;
  double value = 0.0;
};

/// rho^(k) = ||r_k|| / ||r_{k-1}||, k >= 1.
Rate rho_k(const IterationTrace& t, int k);

/// rho_hat^(k) = rho^(k) * rho^(k) / rho^(k-1), k >= 2.
Rate rho_hat_k(const IterationTrace& t, int k);

/// Algebraic error estimator at iterate k (k >= 2):
/// eta_a^(k) = e^{1/(k-1)} * rho^(k-1) / (1 - rho^(k-1)) * ||u^(k)-u^(k-1)||_A.
/// Defers when the rate estimate is unusable (>= 1).
Rate eta_a(const IterationTrace& t, int k);

}  // namespace afemstop
