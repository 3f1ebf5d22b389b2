#pragma once

// Data-parallel arithmetic kernels shared by the convolution, resolvent and
// Wasserstein code. Each kernel has a scalar reference implementation and, on
// x86-64, an AVX2/FMA implementation. The variant is chosen once at runtime
// from CPUID; HAWKES_SIMD=scalar in the environment forces the reference path.
//
// Variants agree up to floating-point reassociation, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace hawkes::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

// Currently selected variant.
Isa active_isa();

// Overrides the selection (tests and benchmarks). Throws if unavailable.
void force_isa(Isa isa);

// Sum of a[i] * b[i]. Spans must have equal length.
double dot(std::span<const double> a, std::span<const double> b);

// Sum of |a[i] - b[i]|. Spans must have equal length.
double abs_diff_sum(std::span<const double> a, std::span<const double> b);

double sum(std::span<const double> a);

// y[i] += alpha * x[i].
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2

}  // namespace hawkes::simd
