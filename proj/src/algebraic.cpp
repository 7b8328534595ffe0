#include "afemstop/algebraic.hpp"

#include <cmath>
#include <stdexcept>

namespace afemstop {

Rate rho_k(const IterationTrace& t, int k) {
  if (k < 1 || k > t.last_iteration())
    throw std::invalid_argument("rho_k: iteration out of range");
  if (t.res[k - 1] == 0.0) return {RateStatus::converged, 0.0};
  return {RateStatus::ok, t.res[k] / t.res[k - 1]};
}

Rate rho_hat_k(const IterationTrace& t, int k) {
  if (k < 2) throw std::invalid_argument("rho_hat_k: needs k >= 2");
  const Rate r = rho_k(t, k);
  const Rate rm = rho_k(t, k - 1);
  if (r.status != RateStatus::ok || rm.status != RateStatus::ok) return {r.status, 0.0};
  if (rm.value == 0.0) return {RateStatus::defer, 0.0};
  return {RateStatus::ok, r.value * r.value / rm.value};
}

Rate eta_a(const IterationTrace& t, int k) {
  if (k < 2 || k > t.last_iteration() || k >= static_cast<int>(t.du_A.size()))
    throw std::invalid_argument("eta_a: needs 2 <= k <= last iteration");
  const Rate r = rho_k(t, k - 1);
  if (r.status == RateStatus::converged) return {RateStatus::converged, 0.0};
  if (r.status != RateStatus::ok || r.value >= 1.0) return {RateStatus::defer, 0.0};
  const double factor = std::exp(1.0 / (k - 1)) * r.value / (1.0 - r.value);
  return {RateStatus::ok, factor * t.du_A[k]};
}

}  // namespace afemstop
