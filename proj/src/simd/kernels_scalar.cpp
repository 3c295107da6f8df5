#include "halfspace/simd/kernels.hpp"

namespace halfspace::simd::scalar {

void stencil_add(double* y, const double* x, std::size_t off, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) y[i] += x[i - off] + x[i + off];
}

void lincomb3(double* out, double a, const double* p, double b, const double* q, double c, const double* r,
              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * p[i] + b * q[i] + c * r[i];
}

void caxpy(std::complex<double>* acc, std::complex<double> z, const std::complex<double>* x, std::size_t n) {
  const double zr = z.real(), zi = z.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    acc[i] += std::complex<double>(zr * xr - zi * xi, zr * xi + zi * xr);
  }
}

std::complex<double> cdot(const std::complex<double>* x, const std::complex<double>* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

}  // namespace halfspace::simd::scalar
