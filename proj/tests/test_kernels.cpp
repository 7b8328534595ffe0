#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "afemstop/kernels.hpp"
#include "afemstop/solvers.hpp"

using namespace afemstop;

namespace {

std::vector<double> rand_vec(int n, std::uint64_t seed) {
  return random_initial_guess(n, seed);
}

}  // namespace

TEST_CASE("scalar dot and axpy basics") {
  std::vector<double> x{3.0, 4.0};
  CHECK(kern::ref::dot(x, x) == doctest::Approx(25.0));
  std::vector<double> y{1.0, 1.0};
  kern::ref::axpy(2.0, x, y);
  CHECK(y[0] == doctest::Approx(7.0));
  CHECK(y[1] == doctest::Approx(9.0));
}

TEST_CASE("dispatched kernels match the scalar reference") {
  const bool has_avx2 = kern::isa_available(kern::Isa::avx2);
  INFO("avx2 available: ", has_avx2);
  for (int n : {1, 3, 4, 7, 8, 33, 1000, 1003}) {
    const auto x = rand_vec(n, 11 + n);
    const auto y = rand_vec(n, 23 + n);

    kern::force_isa(kern::Isa::scalar);
    const double d_scalar = kern::dot(x, y);
    std::vector<double> ax_scalar = y;
    kern::axpy(0.37, x, ax_scalar);

    kern::force_isa(kern::Isa::avx2);  // no-op if unavailable
    const double d_active = kern::dot(x, y);
    std::vector<double> ax_active = y;
    kern::axpy(0.37, x, ax_active);

    CHECK(std::abs(d_active - d_scalar) <= 1e-13 * (1.0 + std::abs(d_scalar)));
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(ax_active[i] - ax_scalar[i]) <= 1e-13 * (1.0 + std::abs(ax_scalar[i])));
  }
  if (has_avx2) CHECK(kern::active_isa() == kern::Isa::avx2);
  kern::force_isa(kern::Isa::avx2);
}

TEST_CASE("csr matvec equivalence on a banded matrix") {
  const int n = 257;
  std::vector<int> rowptr{0};
  std::vector<int> col;
  std::vector<double> val;
  SplitMix64 rng(99);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 3); j <= std::min(n - 1, i + 3); ++j) {
      col.push_back(j);
      val.push_back(rng.next_unit());
    }
    rowptr.push_back(static_cast<int>(col.size()));
  }
  const auto x = rand_vec(n, 5);
  std::vector<double> y_ref(n), y_active(n);
  kern::ref::csr_matvec(rowptr, col, val, x, y_ref);
  kern::csr_matvec(rowptr, col, val, x, y_active);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(y_active[i] - y_ref[i]) <= 1e-13 * (1.0 + std::abs(y_ref[i])));
}

TEST_CASE("nrm2 agrees with direct summation oracle") {
  const auto v = rand_vec(1234, 7);
  double s = 0.0;
  for (double x : v) s += x * x;
  CHECK(kern::nrm2(v) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
}
