#include "afemstop/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <cstring>

namespace afemstop::kern {

namespace ref {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void csr_matvec(std::span<const int> rowptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> x,
                std::span<double> y) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

}  // namespace ref

#if defined(AFEMSTOP_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void csr_matvec(std::span<const int> rowptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> x,
                std::span<double> y);
}  // namespace avx2
#endif

namespace {

Isa detect_isa() {
  // AFEMSTOP_ISA=scalar pins the reference kernels (debugging aid)
  if (const char* env = std::getenv("AFEMSTOP_ISA"))
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
#if defined(AFEMSTOP_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa> g_isa{detect_isa()};

}  // namespace

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(AFEMSTOP_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

void force_isa(Isa isa) {
  if (isa_available(isa)) g_isa.store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
#if defined(AFEMSTOP_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::dot(x, y);
#endif
  return ref::dot(x, y);
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
#if defined(AFEMSTOP_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::axpy(a, x, y);
#endif
  ref::axpy(a, x, y);
}

void csr_matvec(std::span<const int> rowptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> x,
                std::span<double> y) {
#if defined(AFEMSTOP_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::csr_matvec(rowptr, col, val, x, y);
#endif
  ref::csr_matvec(rowptr, col, val, x, y);
}

}  // namespace afemstop::kern
