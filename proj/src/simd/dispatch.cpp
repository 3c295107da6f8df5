#include "halfspace/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace halfspace::simd {

namespace {

bool detect_avx2() {
#if defined(HALFSPACE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("HALFSPACE_SIMD"); env && std::string(env) == "scalar") return Backend::scalar;
  return detect_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

bool avx2_available() {
  static const bool ok = detect_avx2();
  return ok;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) throw std::runtime_error("AVX2 kernels unavailable on this CPU/build");
  current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

#if defined(HALFSPACE_HAVE_AVX2)
#define HALFSPACE_DISPATCH(fn, ...) \
  (active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define HALFSPACE_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void stencil_add(double* y, const double* x, std::size_t off, std::size_t begin, std::size_t end) {
  HALFSPACE_DISPATCH(stencil_add, y, x, off, begin, end);
}

void lincomb3(double* out, double a, const double* p, double b, const double* q, double c, const double* r,
              std::size_t n) {
  HALFSPACE_DISPATCH(lincomb3, out, a, p, b, q, c, r, n);
}

void caxpy(std::complex<double>* acc, std::complex<double> z, const std::complex<double>* x, std::size_t n) {
  HALFSPACE_DISPATCH(caxpy, acc, z, x, n);
}

std::complex<double> cdot(const std::complex<double>* x, const std::complex<double>* y, std::size_t n) {
  return HALFSPACE_DISPATCH(cdot, x, y, n);
}

#undef HALFSPACE_DISPATCH

}  // namespace halfspace::simd
