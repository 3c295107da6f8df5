#pragma once

#include "halfspace/common.hpp"

#include <array>
#include <vector>

namespace halfspace {

// Truncated Taylor expansion in kappa carried together with its exact remainder at one
// fixed kappa:  f(kappa) = sum_{k < m} c_k kappa^k + kappa^m r.
// At kappa = 0 the remainder r is the m-th coefficient. Every operation propagates the
// remainder exactly, so value() is the true matrix at kappa, not an approximation.
struct KappaJet {
  cplx kappa;
  std::vector<CMat> c;
  CMat r;

  int order() const { return static_cast<int>(c.size()); }
  Eigen::Index dim() const { return r.rows(); }
  CMat value() const;
  // Coefficient k for k <= order (k == order returns r, which is exact only at kappa = 0).
  const CMat& coeff(int k) const { return k < order() ? c[k] : r; }
};

KappaJet jet_constant(const CMat& A, int order, cplx kappa);
KappaJet jet_reduce(const KappaJet& a, int order);  // lower the order, folding terms into r

KappaJet operator+(const KappaJet& a, const KappaJet& b);
KappaJet operator-(const KappaJet& a, const KappaJet& b);
KappaJet operator*(const KappaJet& a, const KappaJet& b);
KappaJet operator*(const CMat& A, const KappaJet& b);
KappaJet operator*(const KappaJet& a, const CMat& B);
KappaJet operator*(cplx s, const KappaJet& a);

// a(kappa)^{-1}; throws SingularMatrix if a(0) or a(kappa) is singular.
KappaJet jet_inverse(const KappaJet& a);
// (f - f(0)) / kappa, one order lower.
KappaJet jet_tail(const KappaJet& a);
// kappa f at the same order.
KappaJet jet_times_kappa(const KappaJet& a);
// S a - a S for a constant matrix S.
KappaJet jet_commutator(const CMat& S, const KappaJet& a);

// Scalar jets of order 4 for A (1 - t)^{-1/2} with t = a kappa^2 + b kappa^4.
struct ScalarJet {
  std::array<cplx, 4> c;
  cplx r;
  cplx value(cplx kappa) const;
};
ScalarJet inverse_sqrt_jet(cplx A, cplx a, cplx b, cplx kappa);

// ((1 - t)^{-1/2} - 1) / t, stable for small t.
cplx inverse_sqrt_increment(cplx t);

}  // namespace halfspace
