#pragma once

#include <span>

// Arithmetic kernels for the dense-vector and CSR inner loops. A scalar
// reference implementation always exists; an AVX2/FMA variant is compiled
// when the toolchain supports it and selected once at runtime from cpuid.
// The reference kernels stay reachable so the dispatched variants can be
// equivalence-tested against them.

namespace afemstop::kern {

enum class Isa { scalar, avx2 };

Isa active_isa();
bool isa_available(Isa isa);
// Test hook; ignored when the requested ISA is unavailable.
void force_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
// y += a*x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y = A*x, CSR with n+1 row offsets
void csr_matvec(std::span<const int> rowptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> x,
                std::span<double> y);

namespace ref {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void csr_matvec(std::span<const int> rowptr, std::span<const int> col,
                std::span<const double> val, std::span<const double> x,
                std::span<double> y);
}  // namespace ref

}  // namespace afemstop::kern
