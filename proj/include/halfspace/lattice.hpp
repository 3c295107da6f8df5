#pragma once

#include "halfspace/fiber_model.hpp"

#include <vector>

namespace halfspace {

// Delta_N (x) 1 + 1 (x) A^theta on sites n = 0..L with a hard wall beyond L, plus
// optionally diag(v) on the n = 0 block. Vectors are laid out as x[n * N + k].
class TruncatedFiber {
 public:
  TruncatedFiber(const FiberModel& model, int L, bool with_potential);

  int L() const { return L_; }
  int N() const { return N_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(N_) * (L_ + 1); }
  double spectral_radius_bound() const { return radius_; }

  void apply(const CVec& x, CVec& y) const;
  CMat dense() const;  // for small L only

  const CMat& fiber_matrix() const { return A_; }
  const RVec& boundary_potential() const { return v0_; }

 private:
  int N_;
  int L_;
  CMat A_;
  RVec v0_;
  double radius_;
};

// G (H_L - z)^{-1} G* by block Schur recursion from the wall down to n = 0.
CMat truncated_fiber_resolvent_oracle(cplx z, int L, const FiberModel& model, bool with_potential = false);

// Number of eigenvalues of H_L below x (block LDL* inertia count).
int truncated_eigen_count(double x, int L, const FiberModel& model);

// Eigenvalues of H_L farther than `window` from [min lambda - 2, max lambda + 2].
std::vector<double> truncated_spectrum_oracle(int L, const FiberModel& model, double window = 1e-3);

// psi <- exp(-i t H) psi by Chebyshev expansion on [-R, R], R = spectral_radius_bound().
void chebyshev_propagate(const TruncatedFiber& H, CVec& psi, double t, double tol = 1e-8);

}  // namespace halfspace
