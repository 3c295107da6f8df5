#pragma once

#include "halfspace/fiber_model.hpp"

namespace halfspace {

// int_0^pi (2 cos w + lambda_star - z)^{-1} dw / pi, for z off the segment [lambda_star - 2, lambda_star + 2].
cplx momentum_integral(cplx z, double lambda_star);

// Limit of momentum_integral(lambda + i eps) as eps -> 0+, lambda off the two band edges.
cplx boundary_momentum(double lambda, double lambda_star);

// Closed upper half plane: boundary value when Im z == 0, the integral otherwise.
cplx momentum_integral_upper(cplx z, double lambda_star);

CMat sandwiched_resolvent(cplx z, const FiberModel& model);
CMat boundary_sandwich(double lambda, const FiberModel& model);

struct MMatrix {
  cplx z;
  bool boundary = false;  // true: value at Re z + i0
  CMat value;
  double rcond = 0.0;
};

MMatrix m_matrix(cplx z, const FiberModel& model);
MMatrix m_matrix_boundary(double lambda, const FiberModel& model);

// u - u M u, the right-hand side of the identity for G R(z) G*.
CMat perturbed_sandwich_from_m(const CMat& M, const FiberModel& model);

}  // namespace halfspace
