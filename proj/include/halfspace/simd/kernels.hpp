#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Streaming kernels behind the lattice propagator. Each has a scalar reference
// and an AVX2 variant; the variant is picked once at startup from CPUID and can
// be overridden (tests, or HALFSPACE_SIMD=scalar in the environment).

namespace halfspace::simd {

enum class Backend { scalar, avx2 };

Backend active_backend();
void set_backend(Backend b);  // throws if the CPU lacks the requested ISA
bool avx2_available();
std::string_view backend_name(Backend b);

// y[i] += x[i - off] + x[i + off] for i in [begin, end); doubles.
void stencil_add(double* y, const double* x, std::size_t off, std::size_t begin, std::size_t end);

// out[i] = a * p[i] + b * q[i] + c * r[i]; doubles.
void lincomb3(double* out, double a, const double* p, double b, const double* q, double c, const double* r,
              std::size_t n);

// acc[i] += z * x[i]; complex.
void caxpy(std::complex<double>* acc, std::complex<double> z, const std::complex<double>* x, std::size_t n);

// sum_i conj(x[i]) * y[i].
std::complex<double> cdot(const std::complex<double>* x, const std::complex<double>* y, std::size_t n);

namespace scalar {
void stencil_add(double* y, const double* x, std::size_t off, std::size_t begin, std::size_t end);
void lincomb3(double* out, double a, const double* p, double b, const double* q, double c, const double* r,
              std::size_t n);
void caxpy(std::complex<double>* acc, std::complex<double> z, const std::complex<double>* x, std::size_t n);
std::complex<double> cdot(const std::complex<double>* x, const std::complex<double>* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void stencil_add(double* y, const double* x, std::size_t off, std::size_t begin, std::size_t end);
void lincomb3(double* out, double a, const double* p, double b, const double* q, double c, const double* r,
              std::size_t n);
void caxpy(std::complex<double>* acc, std::complex<double> z, const std::complex<double>* x, std::size_t n);
std::complex<double> cdot(const std::complex<double>* x, const std::complex<double>* y, std::size_t n);
}  // namespace avx2

}  // namespace halfspace::simd
