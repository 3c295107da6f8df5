#include "halfspace/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace halfspace {

RVec singular_values(const CMat& M) {
  if (M.size() == 0) return RVec();
  // BDCSVD switches to Jacobi below its block size, so small matrices take the same path
  Eigen::BDCSVD<CMat> svd(M);
  return svd.singularValues();
}

double rcond(const CMat& M) {
  const RVec s = singular_values(M);
  if (s.size() == 0 || s[0] == 0.0) return 0.0;
  return s[s.size() - 1] / s[0];
}

CMat numerical_kernel_basis(const CMat& M, double tol) {
  const Eigen::Index n = M.cols();
  if (n == 0) return CMat(0, 0);
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  const RVec s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  // Columns beyond the row count have no singular value and always belong to the kernel.
  Eigen::Index rank = 0;
  if (smax > 0.0)
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s[k] >= tol * smax) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

CMat projection_from_basis(const CMat& Q, Eigen::Index n) {
  if (Q.cols() == 0) return CMat::Zero(n, n);
  CMat P = Q * Q.adjoint();
  return 0.5 * (P + P.adjoint());
}

CMat numerical_kernel_projection(const CMat& M, double tol) {
  return projection_from_basis(numerical_kernel_basis(M, tol), M.cols());
}

CMat imag_part(const CMat& M) { return (M - M.adjoint()) / cplx(0.0, 2.0); }

CMat real_part(const CMat& M) { return 0.5 * (M + M.adjoint()); }

double min_eigenvalue_hermitian(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(real_part(H), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

CMat inverse_on_range(const CMat& M, const CMat& S) {
  const Eigen::Index n = M.rows();
  const CMat padded = S * M * S + (CMat::Identity(n, n) - S);
  return S * padded.inverse() * S;
}

double opnorm(const CMat& M) {
  const RVec s = singular_values(M);
  return s.size() ? s[0] : 0.0;
}

}  // namespace halfspace
