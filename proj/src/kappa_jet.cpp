#include "halfspace/kappa_jet.hpp"

#include "halfspace/linalg.hpp"

#include <cmath>

namespace halfspace {

namespace {

void check_compatible(const KappaJet& a, const KappaJet& b) {
  if (a.kappa != b.kappa) throw PreconditionFailed("jets evaluated at different kappa");
  if (a.dim() != b.dim()) throw PreconditionFailed("jet dimension mismatch");
}

CMat truncated_value(const KappaJet& a) {
  CMat v = CMat::Zero(a.dim(), a.dim());
  cplx p = 1.0;
  for (const auto& ck : a.c) {
    v += p * ck;
    p *= a.kappa;
  }
  return v;
}

// Sum of a_i b_j kappa^{i + j - m} over i, j < m with i + j >= m.
CMat overflow(const KappaJet& a, const KappaJet& b, int m) {
  CMat s = CMat::Zero(a.dim(), a.dim());
  for (int i = 0; i < m; ++i)
    for (int j = m - i; j < m; ++j) s += std::pow(a.kappa, i + j - m) * (a.c[i] * b.c[j]);
  return s;
}

// h(t) = ((1 - t)^{-1/2} - 1 - t/2 - 3 t^2/8) / t^3
cplx tail3(cplx t) {
  if (std::abs(t) < 0.25) {
    cplx sum = 0.0, tp = 1.0;
    double b = 5.0 / 16.0;  // C(6,3) / 4^3
    for (int n = 3; n < 200; ++n) {
      const cplx term = b * tp;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      b *= (2.0 * n + 1.0) / (2.0 * n + 2.0);
      tp *= t;
    }
    return sum;
  }
  return (1.0 / std::sqrt(1.0 - t) - 1.0 - 0.5 * t - 0.375 * t * t) / (t * t * t);
}

}  // namespace

CMat KappaJet::value() const {
  cplx p = std::pow(kappa, order());
  return truncated_value(*this) + p * r;
}

KappaJet jet_constant(const CMat& A, int order, cplx kappa) {
  KappaJet j{kappa, std::vector<CMat>(order, CMat::Zero(A.rows(), A.cols())), CMat::Zero(A.rows(), A.cols())};
  if (order > 0)
    j.c[0] = A;
  else
    j.r = A;
  return j;
}

KappaJet jet_reduce(const KappaJet& a, int order) {
  if (order >= a.order()) return a;
  KappaJet out{a.kappa, std::vector<CMat>(a.c.begin(), a.c.begin() + order), CMat::Zero(a.dim(), a.dim())};
  cplx p = 1.0;
  for (int k = order; k < a.order(); ++k) {
    out.r += p * a.c[k];
    p *= a.kappa;
  }
  out.r += p * a.r;
  return out;
}

KappaJet operator+(const KappaJet& a0, const KappaJet& b0) {
  check_compatible(a0, b0);
  const int m = std::min(a0.order(), b0.order());
  const KappaJet a = jet_reduce(a0, m), b = jet_reduce(b0, m);
  KappaJet out = a;
  for (int k = 0; k < m; ++k) out.c[k] += b.c[k];
  out.r += b.r;
  return out;
}

KappaJet operator*(cplx s, const KappaJet& a) {
  KappaJet out = a;
  for (auto& ck : out.c) ck *= s;
  out.r *= s;
  return out;
}

KappaJet operator-(const KappaJet& a, const KappaJet& b) { return a + cplx(-1.0) * b; }

KappaJet operator*(const KappaJet& a0, const KappaJet& b0) {
  check_compatible(a0, b0);
  const int m = std::min(a0.order(), b0.order());
  const KappaJet a = jet_reduce(a0, m), b = jet_reduce(b0, m);
  KappaJet out{a.kappa, std::vector<CMat>(m, CMat::Zero(a.dim(), a.dim())), CMat()};
  for (int k = 0; k < m; ++k)
    for (int i = 0; i <= k; ++i) out.c[k] += a.c[i] * b.c[k - i];
  out.r = overflow(a, b, m) + a.r * b.value() + truncated_value(a) * b.r;
  return out;
}

KappaJet operator*(const CMat& A, const KappaJet& b) {
  KappaJet out = b;
  for (auto& ck : out.c) ck = A * ck;
  out.r = A * out.r;
  return out;
}

KappaJet operator*(const KappaJet& a, const CMat& B) {
  KappaJet out = a;
  for (auto& ck : out.c) ck = ck * B;
  out.r = out.r * B;
  return out;
}

KappaJet jet_inverse(const KappaJet& a) {
  const int m = a.order();
  if (m == 0) throw PreconditionFailed("cannot invert an order-0 jet");
  if (rcond(a.c[0]) < kSingularRcond) throw SingularMatrix("leading jet coefficient is singular");
  Eigen::PartialPivLU<CMat> lu0(a.c[0]);
  KappaJet g{a.kappa, std::vector<CMat>(m), CMat::Zero(a.dim(), a.dim())};
  g.c[0] = lu0.inverse();
  for (int k = 1; k < m; ++k) {
    CMat s = CMat::Zero(a.dim(), a.dim());
    for (int i = 1; i <= k; ++i) s += a.c[i] * g.c[k - i];
    g.c[k] = -lu0.solve(s);
  }
  // a * G_t = 1 + kappa^m rho with G_t the truncated inverse; then r_g = -a^{-1} rho.
  const KappaJet gt{a.kappa, g.c, CMat::Zero(a.dim(), a.dim())};
  const KappaJet prod = a * gt;
  if (a.kappa == cplx(0.0)) {
    g.r = -lu0.solve(prod.r);
  } else {
    const CMat av = a.value();
    if (rcond(av) < 1e-14) throw SingularMatrix("jet value is singular at this kappa");
    g.r = -av.partialPivLu().solve(prod.r);
  }
  return g;
}

KappaJet jet_tail(const KappaJet& a) {
  if (a.order() == 0) throw PreconditionFailed("tail of an order-0 jet");
  return KappaJet{a.kappa, std::vector<CMat>(a.c.begin() + 1, a.c.end()), a.r};
}

KappaJet jet_times_kappa(const KappaJet& a) {
  const int m = a.order();
  if (m == 0) return KappaJet{a.kappa, {}, a.kappa * a.r};
  KappaJet out{a.kappa, std::vector<CMat>(m), CMat()};
  out.c[0] = CMat::Zero(a.dim(), a.dim());
  for (int k = 1; k < m; ++k) out.c[k] = a.c[k - 1];
  out.r = a.c[m - 1] + a.kappa * a.r;
  return out;
}

KappaJet jet_commutator(const CMat& S, const KappaJet& a) { return S * a - a * S; }

cplx ScalarJet::value(cplx kappa) const {
  cplx v = 0.0, p = 1.0;
  for (const auto& ck : c) {
    v += p * ck;
    p *= kappa;
  }
  return v + p * r;
}

ScalarJet inverse_sqrt_jet(cplx A, cplx a, cplx b, cplx kappa) {
  // (1 - t)^{-1/2} = 1 + t/2 + 3 t^2 / 8 + t^3 h(t), t = kappa^2 (a + b kappa^2)
  const cplx k2 = kappa * kappa;
  const cplx tau = a + b * k2;
  const cplx t = k2 * tau;
  if (std::abs(t) >= 0.9) throw RadiusExceeded("kappa too large for the threshold expansion");
  ScalarJet s;
  s.c = {A, 0.0, 0.5 * A * a, 0.0};
  s.r = A * (0.5 * b + 0.375 * tau * tau + k2 * tau * tau * tau * tail3(t));
  return s;
}

cplx inverse_sqrt_increment(cplx t) { return 0.5 + t * (0.375 + t * tail3(t)); }

}  // namespace halfspace
