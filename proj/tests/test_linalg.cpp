#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "afemstop/linalg.hpp"
#include "afemstop/solvers.hpp"

using namespace afemstop;

namespace {

SparseSpd random_spd(int n, std::uint64_t seed) {
  // M^T M + n I assembled densely, then converted
  SplitMix64 rng(seed);
  std::vector<double> m(static_cast<size_t>(n) * n);
  for (auto& v : m) v = rng.next_unit();
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
      if (i == j) s += n;
      trips.push_back({i, j, s});
    }
  }
  return csr_from_triplets(n, trips);
}

SparseSpd identity(int n) {
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i) trips.push_back({i, i, 1.0});
  return csr_from_triplets(n, trips);
}

}  // namespace

TEST_CASE("norm2 basics") {
  CHECK(norm2({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(norm2(Vec(17, 0.0)) == 0.0);
  const Vec v = random_initial_guess(400, 3);
  double s = 0.0;
  for (double x : v) s += x * x;
  CHECK(norm2(v) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
}

TEST_CASE("norm_A basics and dimension check") {
  const SparseSpd I = identity(2);
  CHECK(norm_A(I, {3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(norm_A(I, {0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(norm_A(I, {1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("norm_A Pythagoras for A-orthogonal vectors") {
  const SparseSpd A = random_spd(12, 17);
  const Vec v = random_initial_guess(12, 5);
  Vec w = random_initial_guess(12, 6);
  // project w to be A-orthogonal to v
  const Vec av = A.multiply(v);
  const double c = dot(av, w) / dot(av, v);
  for (int i = 0; i < 12; ++i) w[i] -= c * v[i];
  CHECK(std::abs(dot(A.multiply(v), w)) < 1e-10);
  Vec sum(12);
  for (int i = 0; i < 12; ++i) sum[i] = v[i] + w[i];
  const double lhs = norm_A(A, v) * norm_A(A, v) + norm_A(A, w) * norm_A(A, w);
  const double rhs = norm_A(A, sum) * norm_A(A, sum);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("direct_solve identity and diagonal") {
  const SparseSpd I = identity(5);
  const Vec f{1.0, 2.0, 3.0, 4.0, 5.0};
  const Vec x = direct_solve(I, f);
  for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(f[i]));

  std::vector<Triplet> trips;
  for (int i = 0; i < 6; ++i) trips.push_back({i, i, 2.0});
  const SparseSpd D = csr_from_triplets(6, trips);
  const Vec ones = direct_solve(D, Vec(6, 2.0));
  for (double v : ones) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("direct_solve residual contract on random SPD 50x50") {
  const SparseSpd A = random_spd(50, 23);
  const Vec f = random_initial_guess(50, 29);
  const Vec x = direct_solve(A, f);
  const Vec r = subtract(f, A.multiply(x));
  CHECK(norm2(r) <= 1e-12 * norm2(f));
}

TEST_CASE("direct_solve minimizes the quadratic: gradient vanishes") {
  const SparseSpd A = random_spd(30, 31);
  const Vec f = random_initial_guess(30, 37);
  const Vec x = direct_solve(A, f);
  const Vec g = subtract(A.multiply(x), f);
  CHECK(norm2(g) <= 1e-11 * std::max(1.0, norm2(f)));
}

TEST_CASE("direct_solve rejects non-SPD input") {
  std::vector<Triplet> trips{{0, 0, 1.0}, {1, 1, -1.0}};
  const SparseSpd A = csr_from_triplets(2, trips);
  CHECK_THROWS_AS(direct_solve(A, Vec{1.0, 1.0}), NotSpdError);
}

TEST_CASE("csr assembly merges duplicates and stays symmetric") {
  std::vector<Triplet> trips{{0, 1, 0.5}, {0, 1, 0.5}, {1, 0, 1.0}, {0, 0, 2.0}, {1, 1, 2.0}};
  const SparseSpd A = csr_from_triplets(2, trips);
  CHECK(A.max_asymmetry() <= 1e-15);
  const Vec y = A.multiply({1.0, 1.0});
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(3.0));
}

TEST_CASE("dense lu_solve recovers a known solution") {
  DenseMat A(3, 3);
  A(0, 0) = 2;  A(0, 1) = 1;  A(0, 2) = 0;
  A(1, 0) = 1;  A(1, 1) = 3;  A(1, 2) = 1;
  A(2, 0) = 0;  A(2, 1) = 1;  A(2, 2) = 4;
  const Vec xs{1.0, -2.0, 3.0};
  const Vec b = A.multiply(xs);
  const Vec x = lu_solve(A, b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(xs[i]).epsilon(1e-13));

  DenseMat S(2, 2);
  S(0, 0) = 1;  S(0, 1) = 2;
  S(1, 0) = 2;  S(1, 1) = 4;
  CHECK_THROWS_AS(lu_solve(S, Vec{1.0, 1.0}), SingularError);
}
