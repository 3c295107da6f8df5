#pragma once

#include "halfspace/fiber_model.hpp"

#include <map>
#include <utility>
#include <vector>

namespace halfspace {

// Adaptive Gauss-Kronrod evaluation (the rule's error estimate saturates near 1e-11, so the
// default tolerance sits above that; observed errors are ~1e-14) of int_0^pi (2 cos w + mu - z)^{-1} dw / pi.
cplx momentum_quadrature(cplx z, double mu, double tol = 1e-10);

// int_0^pi vhalf (2 cos w + A^theta - z)^{-1} vhalf dw / pi with A^theta diagonalized numerically.
CMat sandwiched_quadrature_oracle(cplx z, const FiberModel& model, double tol = 1e-10);

// Boundary value at lambda + i0 by Richardson extrapolation of the quadrature oracle at
// lambda + i eps, eps in {eps0, eps0/2, eps0/4, eps0/8}.
CMat boundary_sandwich_extrapolated(double lambda, const FiberModel& model, double eps0 = 4e-3);

// Finitely supported psi on Z x N: key (x, n) -> value.
using LatticeFunction = std::map<std::pair<long, long>, cplx>;

struct FiberVector {
  double theta = 0.0;
  int N = 0;
  std::vector<CVec> sites;        // n-representation: sites[n] in C^N
  std::vector<double> omega;      // sample points in [0, pi)
  std::vector<CVec> omega_values; // G2 applied, one C^N vector per omega
};

FiberVector bloch_transform(const LatticeFunction& psi, int N, double theta, int n_omega = 16);

// H0 on Z x N applied to a finitely supported function (exact).
LatticeFunction apply_free_lattice(const LatticeFunction& psi);

}  // namespace halfspace
