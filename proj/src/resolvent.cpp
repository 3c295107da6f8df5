#include "halfspace/resolvent.hpp"

#include "halfspace/linalg.hpp"

#include <cmath>
#include <sstream>

namespace halfspace {

cplx momentum_integral(cplx z, double lambda_star) {
  const cplx w = z - lambda_star;
  if (w.imag() == 0.0 && std::abs(w.real()) <= 2.0) {
    std::ostringstream os;
    os << "z = " << z.real() << " lies on the band segment of lambda* = " << lambda_star;
    throw BoundaryPoint(os.str());
  }
  // Roots of a^2 - w a + 1; exactly one lies strictly inside the unit disc.
  const cplx s = std::sqrt(w * w - 4.0);
  const cplx ap = 0.5 * (w + s);
  const cplx am = 0.5 * (w - s);
  return std::abs(ap) < std::abs(am) ? 1.0 / (ap - am) : 1.0 / (am - ap);
}

cplx boundary_momentum(double lambda, double lambda_star) {
  const double w = lambda - lambda_star;
  const double b2 = std::sqrt(std::abs(w * w - 4.0));
  if (std::abs(std::abs(w) - 2.0) <= kThresholdTol || b2 == 0.0)
    throw ThresholdPoint("boundary value requested at a band edge");
  if (w < -2.0) return 1.0 / b2;
  if (w > 2.0) return -1.0 / b2;
  return kI / b2;
}

cplx momentum_integral_upper(cplx z, double lambda_star) {
  if (z.imag() == 0.0) return boundary_momentum(z.real(), lambda_star);
  return momentum_integral(z, lambda_star);
}

CMat sandwiched_resolvent(cplx z, const FiberModel& model) {
  if (z.imag() == 0.0) throw BoundaryPoint("sandwiched_resolvent needs Im z != 0; use boundary_sandwich");
  CMat out = CMat::Zero(model.N(), model.N());
  for (int c = 0; c < model.N(); ++c) out += momentum_integral(z, model.eig.lambda[c]) * model.vPv[c];
  return out;
}

CMat boundary_sandwich(double lambda, const FiberModel& model) {
  if (model.is_threshold(lambda)) throw ThresholdPoint("boundary_sandwich called at a threshold");
  CMat out = CMat::Zero(model.N(), model.N());
  for (int c = 0; c < model.N(); ++c) out += boundary_momentum(lambda, model.eig.lambda[c]) * model.vPv[c];
  return out;
}

namespace {

MMatrix invert_checked(const CMat& T, cplx z, bool boundary) {
  MMatrix m;
  m.z = z;
  m.boundary = boundary;
  m.rcond = rcond(T);
  if (m.rcond < kSingularRcond) {
    std::ostringstream os;
    os << "u + G R0 G* is singular at " << (boundary ? "lambda + i0, lambda = " : "z = ") << z
       << " (rcond " << m.rcond << ")";
    throw SingularMatrix(os.str());
  }
  m.value = T.partialPivLu().inverse();
  return m;
}

}  // namespace

MMatrix m_matrix(cplx z, const FiberModel& model) {
  return invert_checked(model.U + sandwiched_resolvent(z, model), z, false);
}

MMatrix m_matrix_boundary(double lambda, const FiberModel& model) {
  return invert_checked(model.U + boundary_sandwich(lambda, model), cplx(lambda, 0.0), true);
}

CMat perturbed_sandwich_from_m(const CMat& M, const FiberModel& model) {
  return model.U - model.U * M * model.U;
}

}  // namespace halfspace
