#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace afemstop {

using Vec = std::vector<double>;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotSpdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
Vec subtract(const Vec& a, const Vec& b);

/// Sparse symmetric matrix in CSR form. Assembled symmetric by construction;
/// positive definite only after Dirichlet elimination.
struct SparseSpd {
  int n = 0;
  std::vector<int> rowptr;  // n+1 offsets
  std::vector<int> col;
  std::vector<double> val;

  Vec multiply(const Vec& x) const;
  double max_asymmetry() const;  // max |a_ij - a_ji| over stored entries
};

struct Triplet {
  int row, col;
  double value;
};

SparseSpd csr_from_triplets(int n, std::vector<Triplet> triplets);

/// Energy norm sqrt(A v . v); negative roundoff is clamped to zero.
double norm_A(const SparseSpd& A, const Vec& v);

// Small dense matrices (patch problems, test oracles).
struct DenseMat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  DenseMat() = default;
  DenseMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  Vec multiply(const Vec& x) const;
};

/// LU with partial pivoting; throws SingularError.
Vec lu_solve(DenseMat A, Vec b);

std::vector<int> rcm_ordering(const SparseSpd& A);

/// Skyline LDL^T factorization under an RCM permutation. Factorizing a
/// matrix with a non-positive pivot throws NotSpdError.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const SparseSpd& A);
  Vec solve(const Vec& f) const;  // one iterative-refinement pass included
  const SparseSpd& matrix() const { return A_; }

 private:
  Vec solve_once(const Vec& f) const;

  SparseSpd A_;
  std::vector<int> perm_, iperm_;
  std::vector<int> first_;      // first stored column per permuted row
  std::vector<long> offset_;    // start of each row segment in low_
  std::vector<double> low_;     // strictly-lower row segments of L
  std::vector<double> diag_;    // D
};

Vec direct_solve(const SparseSpd& A, const Vec& f);

}  // namespace afemstop
