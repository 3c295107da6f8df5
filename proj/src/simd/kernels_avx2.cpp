#include "halfspace/simd/kernels.hpp"

#include <immintrin.h>

namespace halfspace::simd::avx2 {

void stencil_add(double* y, const double* x, std::size_t off, std::size_t begin, std::size_t end) {
  std::size_t i = begin;
  for (; i + 4 <= end; i += 4) {
    const __m256d lo = _mm256_loadu_pd(x + i - off);
    const __m256d hi = _mm256_loadu_pd(x + i + off);
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_add_pd(lo, hi)));
  }
  for (; i < end; ++i) y[i] += x[i - off] + x[i + off];
}

void lincomb3(double* out, double a, const double* p, double b, const double* q, double c, const double* r,
              std::size_t n) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b), vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(va, _mm256_loadu_pd(p + i));
    acc = _mm256_fmadd_pd(vb, _mm256_loadu_pd(q + i), acc);
    acc = _mm256_fmadd_pd(vc, _mm256_loadu_pd(r + i), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) out[i] = a * p[i] + b * q[i] + c * r[i];
}

void caxpy(std::complex<double>* acc, std::complex<double> z, const std::complex<double>* x, std::size_t n) {
  auto* a = reinterpret_cast<double*>(acc);
  const auto* xs = reinterpret_cast<const double*>(x);
  const __m256d zr = _mm256_set1_pd(z.real()), zi = _mm256_set1_pd(z.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(xs + 2 * i);
    const __m256d swapped = _mm256_permute_pd(v, 0b0101);
    const __m256d prod = _mm256_fmaddsub_pd(zr, v, _mm256_mul_pd(zi, swapped));
    _mm256_storeu_pd(a + 2 * i, _mm256_add_pd(_mm256_loadu_pd(a + 2 * i), prod));
  }
  for (; i < n; ++i) acc[i] += z * x[i];
}

std::complex<double> cdot(const std::complex<double>* x, const std::complex<double>* y, std::size_t n) {
  const auto* xs = reinterpret_cast<const double*>(x);
  const auto* ys = reinterpret_cast<const double*>(y);
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xs + 2 * i);
    const __m256d vy = _mm256_loadu_pd(ys + 2 * i);
    re = _mm256_fmadd_pd(vx, vy, re);
    im = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0b0101), im);
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(m, im);
  double sre = r[0] + r[1] + r[2] + r[3];
  double sim = (m[0] - m[1]) + (m[2] - m[3]);
  for (; i < n; ++i) {
    sre += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    sim += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {sre, sim};
}

}  // namespace halfspace::simd::avx2
