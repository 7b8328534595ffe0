#include "afemstop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "afemstop/kernels.hpp"

namespace afemstop {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  return kern::dot(a, b);
}

double norm2(const Vec& v) { return kern::nrm2(v); }

Vec subtract(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("subtract: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec SparseSpd::multiply(const Vec& x) const {
  if (static_cast<int>(x.size()) != n) throw DimensionError("multiply: size mismatch");
  Vec y(n);
  kern::csr_matvec(rowptr, col, val, x, y);
  return y;
}

double SparseSpd::max_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) {
      const int j = col[k];
      if (j < i) continue;
      double aji = 0.0;
      for (int l = rowptr[j]; l < rowptr[j + 1]; ++l)
        if (col[l] == i) { aji = val[l]; break; }
      worst = std::max(worst, std::abs(val[k] - aji));
    }
  }
  return worst;
}

SparseSpd csr_from_triplets(int n, std::vector<Triplet> t) {
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseSpd m;
  m.n = n;
  m.rowptr.assign(n + 1, 0);
  for (size_t i = 0; i < t.size();) {
    size_t j = i;
    double s = 0.0;
    while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) s += t[j++].value;
    m.col.push_back(t[i].col);
    m.val.push_back(s);
    ++m.rowptr[t[i].row + 1];
    i = j;
  }
  for (int i = 0; i < n; ++i) m.rowptr[i + 1] += m.rowptr[i];
  return m;
}

double norm_A(const SparseSpd& A, const Vec& v) {
  const double q = dot(A.multiply(v), v);
  return std::sqrt(std::max(q, 0.0));
}

Vec DenseMat::multiply(const Vec& x) const {
  Vec y(rows, 0.0);
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vec lu_solve(DenseMat A, Vec b) {
  const int n = A.rows;
  if (A.cols != n || static_cast<int>(b.size()) != n)
    throw DimensionError("lu_solve: shape mismatch");
  std::vector<int> piv(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
    piv[k] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
    if (A(k, k) == 0.0) throw SingularError("lu_solve: singular matrix");
    for (int i = k + 1; i < n; ++i) {
      const double l = A(i, k) / A(k, k);
      A(i, k) = l;
      for (int j = k + 1; j < n; ++j) A(i, j) -= l * A(k, j);
    }
  }
  // PA = LU with the final L, so permute b completely before substituting
  for (int k = 0; k < n; ++k) std::swap(b[k], b[piv[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) b[i] -= A(i, k) * b[k];
  for (int k = n - 1; k >= 0; --k) {
    for (int j = k + 1; j < n; ++j) b[k] -= A(k, j) * b[j];
    b[k] /= A(k, k);
  }
  return b;
}

std::vector<int> rcm_ordering(const SparseSpd& A) {
  const int n = A.n;
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = A.rowptr[i + 1] - A.rowptr[i];

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);

  auto bfs = [&](int root, std::vector<int>& out) {
    out.clear();
    std::fill(seen.begin(), seen.end(), 0);
    std::queue<int> q;
    q.push(root);
    seen[root] = 1;
    std::vector<int> nbrs;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      out.push_back(u);
      nbrs.clear();
      for (int k = A.rowptr[u]; k < A.rowptr[u + 1]; ++k) {
        const int v = A.col[k];
        if (v != u && !seen[v]) {
          seen[v] = 1;
          nbrs.push_back(v);
        }
      }
      std::sort(nbrs.begin(), nbrs.end(),
                [&](int a, int b) { return degree[a] != degree[b] ? degree[a] < degree[b] : a < b; });
      for (int v : nbrs) q.push(v);
    }
  };

  std::vector<char> visited(n, 0);
  std::vector<int> component;
  for (int s = 0; s < n; ++s) {
    if (visited[s]) continue;
    // pseudo-peripheral start: two BFS passes from the min-degree node
    int root = s;
    for (int i = s; i < n; ++i)
      if (!visited[i] && degree[i] < degree[root]) root = i;
    bfs(root, component);
    int far = component.back();
    bfs(far, component);
    for (int v : component) {
      order.push_back(v);
      visited[v] = 1;
    }
  }
  std::reverse(order.begin(), order.end());
  return order;  // order[k] = original index placed at position k
}

CholeskyFactor::CholeskyFactor(const SparseSpd& A) : A_(A) {
  const int n = A.n;
  perm_ = rcm_ordering(A);
  iperm_.assign(n, 0);
  for (int k = 0; k < n; ++k) iperm_[perm_[k]] = k;

  first_.assign(n, 0);
  for (int pi = 0; pi < n; ++pi) {
    const int i = perm_[pi];
    int f = pi;
    for (int k = A.rowptr[i]; k < A.rowptr[i + 1]; ++k) f = std::min(f, iperm_[A.col[k]]);
    first_[pi] = f;
  }
  // the envelope must be monotone enough for the factorization loop: row i
  // references rows j in [first_i, i), which in turn reach back to first_j;
  // fill within the envelope is handled by storing the full segment.
  offset_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) offset_[i + 1] = offset_[i] + (i - first_[i]);
  low_.assign(offset_[n], 0.0);
  diag_.assign(n, 0.0);

  // scatter permuted A into the skyline
  for (int pi = 0; pi < n; ++pi) {
    const int i = perm_[pi];
    for (int k = A.rowptr[i]; k < A.rowptr[i + 1]; ++k) {
      const int pj = iperm_[A.col[k]];
      if (pj == pi)
        diag_[pi] = A.val[k];
      else if (pj < pi)
        low_[offset_[pi] + (pj - first_[pi])] = A.val[k];
    }
  }

  // in-place LDL^T on the envelope
  for (int i = 0; i < n; ++i) {
    const int fi = first_[i];
    double* rowi = low_.data() + offset_[i] - fi;  // rowi[j] addresses L(i,j)
    for (int j = fi; j < i; ++j) {
      const int fj = first_[j];
      const double* rowj = low_.data() + offset_[j] - fj;
      const int lo = std::max(fi, fj);
      double s = rowi[j];
      for (int k = lo; k < j; ++k) s -= rowi[k] * diag_[k] * rowj[k];
      rowi[j] = s / diag_[j];
    }
    double d = diag_[i];
    for (int k = fi; k < i; ++k) d -= rowi[k] * rowi[k] * diag_[k];
    if (!(d > 0.0)) throw NotSpdError("CholeskyFactor: non-positive pivot");
    diag_[i] = d;
  }
}

Vec CholeskyFactor::solve_once(const Vec& f) const {
  const int n = A_.n;
  Vec y(n);
  for (int pi = 0; pi < n; ++pi) y[pi] = f[perm_[pi]];
  // forward: L y = f
  for (int i = 0; i < n; ++i) {
    const int fi = first_[i];
    const double* rowi = low_.data() + offset_[i] - fi;
    double s = y[i];
    for (int k = fi; k < i; ++k) s -= rowi[k] * y[k];
    y[i] = s;
  }
  for (int i = 0; i < n; ++i) y[i] /= diag_[i];
  // backward: L^T x = y
  for (int i = n - 1; i >= 0; --i) {
    const int fi = first_[i];
    const double* rowi = low_.data() + offset_[i] - fi;
    const double xi = y[i];
    for (int k = fi; k < i; ++k) y[k] -= rowi[k] * xi;
  }
  Vec x(n);
  for (int pi = 0; pi < n; ++pi) x[perm_[pi]] = y[pi];
  return x;
}

Vec CholeskyFactor::solve(const Vec& f) const {
  if (static_cast<int>(f.size()) != A_.n) throw DimensionError("solve: size mismatch");
  Vec x = solve_once(f);
  Vec r = subtract(f, A_.multiply(x));
  Vec dx = solve_once(r);
  for (int i = 0; i < A_.n; ++i) x[i] += dx[i];
  return x;
}

Vec direct_solve(const SparseSpd& A, const Vec& f) {
  return CholeskyFactor(A).solve(f);
}

}  // namespace afemstop
