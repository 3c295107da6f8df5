#include "halfspace/lattice.hpp"

#include "halfspace/linalg.hpp"
#include "halfspace/simd/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace halfspace {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TruncatedFiber::TruncatedFiber(const FiberModel& model, int L, bool with_potential)
    : N_(model.N()), L_(L), A_(build_fiber_matrix(model.theta(), model.N())), v0_(RVec::Zero(model.N())) {
  if (L < 2) throw InvalidRun("truncation length must be at least 2");
  if (with_potential)
    for (int k = 0; k < N_; ++k) v0_[k] = model.spec.v[k];
  radius_ = 4.0 + (with_potential ? model.max_abs_v() : 0.0);
}

void TruncatedFiber::apply(const CVec& x, CVec& y) const {
  y.resize(size());
  Eigen::Map<const CMat> X(x.data(), N_, L_ + 1);
  Eigen::Map<CMat> Y(y.data(), N_, L_ + 1);
  Y.noalias() = A_ * X;

  auto* yd = reinterpret_cast<double*>(y.data());
  const auto* xd = reinterpret_cast<const double*>(x.data());
  const std::size_t blk = 2 * static_cast<std::size_t>(N_);
  simd::stencil_add(yd, xd, blk, blk, blk * static_cast<std::size_t>(L_));

  Y.col(0) += kSqrt2 * X.col(1);
  Y.col(1) += (kSqrt2 - 1.0) * X.col(0);
  Y.col(L_) += X.col(L_ - 1);
  Y.col(0) += (v0_.cast<cplx>().array() * X.col(0).array()).matrix();
}

CMat TruncatedFiber::dense() const {
  const Eigen::Index n = size();
  CMat H = CMat::Zero(n, n);
  for (int s = 0; s <= L_; ++s) {
    H.block(s * N_, s * N_, N_, N_) = A_;
    if (s + 1 <= L_) {
      const double t = s == 0 ? kSqrt2 : 1.0;
      H.block(s * N_, (s + 1) * N_, N_, N_) = t * CMat::Identity(N_, N_);
      H.block((s + 1) * N_, s * N_, N_, N_) = t * CMat::Identity(N_, N_);
    }
  }
  for (int k = 0; k < N_; ++k) H(k, k) += v0_[k];
  return H;
}

CMat truncated_fiber_resolvent_oracle(cplx z, int L, const FiberModel& model, bool with_potential) {
  if (L < 2) throw InvalidRun("truncation length must be at least 2");
  const int N = model.N();
  const CMat D = build_fiber_matrix(model.theta(), N) - z * CMat::Identity(N, N);
  auto checked_inverse = [&](const CMat& M, int site) {
    Eigen::PartialPivLU<CMat> lu(M);
    const double rc = lu.rcond();
    if (!(rc > 1e-13)) {
      std::ostringstream os;
      os << "near-singular Schur block at site " << site << " (rcond " << rc << "); increase L or move z off the axis";
      throw InvalidRun(os.str());
    }
    return CMat(lu.inverse());
  };
  CMat g = checked_inverse(D, L);
  for (int s = L - 1; s >= 1; --s) g = checked_inverse(D - g, s);
  CMat D0 = D - 2.0 * g;
  if (with_potential)
    for (int k = 0; k < N; ++k) D0(k, k) += model.spec.v[k];
  const CMat g0 = checked_inverse(D0, 0);
  return model.Vh * g0 * model.Vh;
}

int truncated_eigen_count(double x, int L, const FiberModel& model) {
  const int N = model.N();
  const CMat A = build_fiber_matrix(model.theta(), N);
  CMat S = A - x * CMat::Identity(N, N);
  for (int k = 0; k < N; ++k) S(k, k) += model.spec.v[k];
  int count = 0;
  Eigen::SelfAdjointEigenSolver<CMat> es;
  for (int s = 0;; ++s) {
    es.compute(S);
    const RVec& ev = es.eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      if (ev[k] < 0.0) ++count;
    }
    if (s == L) break;
    const double t2 = s == 0 ? 2.0 : 1.0;
    // S^{-1} through the eigendecomposition; an exactly-zero pivot is nudged, which only
    // shifts x by a rounding-level amount.
    RVec inv(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k) inv[k] = 1.0 / (ev[k] == 0.0 ? 1e-300 : ev[k]);
    const CMat Sinv = es.eigenvectors() * inv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    S = A - x * CMat::Identity(N, N) - t2 * Sinv;
  }
  return count;
}

std::vector<double> truncated_spectrum_oracle(int L, const FiberModel& model, double window) {
  const double pad = 1.0 + model.max_abs_v();
  const double lo_ess = model.bands.spectrum_lo - window;
  const double hi_ess = model.bands.spectrum_hi + window;
  const double a = -4.0 - pad;
  const double b = 4.0 + pad;
  std::vector<double> out;

  // Bisect for the k-th eigenvalue (k-th value of the counting function) in (lo, hi).
  auto locate = [&](int k, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (truncated_eigen_count(mid, L, model) > k)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };

  const int n_a = truncated_eigen_count(a, L, model);
  const int n_lo = truncated_eigen_count(lo_ess, L, model);
  for (int k = n_a; k < n_lo; ++k) out.push_back(locate(k, a, lo_ess));
  const int n_hi = truncated_eigen_count(hi_ess, L, model);
  const int n_b = truncated_eigen_count(b, L, model);
  for (int k = n_hi; k < n_b; ++k) out.push_back(locate(k, hi_ess, b));
  return out;
}

void chebyshev_propagate(const TruncatedFiber& H, CVec& psi, double t, double tol) {
  if (t == 0.0) return;
  const double R = H.spectral_radius_bound();
  const double max_step = 40.0 / R;
  const int chunks = std::max(1, static_cast<int>(std::ceil(std::abs(t) / max_step)));
  const double dt = t / chunks;
  const double x = R * std::abs(dt);
  const double sgn = dt > 0 ? 1.0 : -1.0;

  std::vector<cplx> coef;
  for (int k = 0;; ++k) {
    const double J = std::cyl_bessel_j(static_cast<double>(k), x);
    cplx a = (k == 0 ? 1.0 : 2.0) * J * std::pow(cplx(0.0, -sgn), k);
    coef.push_back(a);
    if (k > x + 10 && std::abs(J) < 1e-3 * tol) break;
  }

  const Eigen::Index n = H.size();
  const std::size_t nd = 2 * static_cast<std::size_t>(n);
  CVec prev(n), cur(n), next(n), hx(n), acc(n);
  for (int c = 0; c < chunks; ++c) {
    acc.setZero();
    prev = psi;
    simd::caxpy(acc.data(), coef[0], prev.data(), n);
    H.apply(prev, hx);
    cur = hx / R;
    simd::caxpy(acc.data(), coef[1], cur.data(), n);
    for (std::size_t k = 2; k < coef.size(); ++k) {
      H.apply(cur, hx);
      simd::lincomb3(reinterpret_cast<double*>(next.data()), 2.0 / R, reinterpret_cast<const double*>(hx.data()), 0.0,
                     reinterpret_cast<const double*>(cur.data()), -1.0, reinterpret_cast<const double*>(prev.data()),
                     nd);
      simd::caxpy(acc.data(), coef[k], next.data(), n);
      std::swap(prev, cur);
      std::swap(cur, next);
    }
    psi = acc;
  }
}

}  // namespace halfspace
