#pragma once

#include "halfspace/common.hpp"

namespace halfspace {

inline constexpr double kKernelTol = 1e-8;
inline constexpr double kSingularRcond = 1e-10;

RVec singular_values(const CMat& M);

// sigma_min / sigma_max; 0 for the zero matrix.
double rcond(const CMat& M);

// Orthonormal basis (columns) of the right singular vectors with sigma < tol * sigma_max.
CMat numerical_kernel_basis(const CMat& M, double tol = kKernelTol);
CMat numerical_kernel_projection(const CMat& M, double tol = kKernelTol);

// Hermitian projection onto the column span of an orthonormal basis.
CMat projection_from_basis(const CMat& Q, Eigen::Index n);

CMat imag_part(const CMat& M);  // (M - M*) / 2i
CMat real_part(const CMat& M);  // (M + M*) / 2

double min_eigenvalue_hermitian(const CMat& H);

// Inverse of M restricted to the range of the projection S, extended by zero.
CMat inverse_on_range(const CMat& M, const CMat& S);

double opnorm(const CMat& M);

}  // namespace halfspace
