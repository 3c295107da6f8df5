#include "halfspace/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace halfspace {

cplx momentum_quadrature(cplx z, double mu, double tol) {
  auto f = [&](double w) { return 1.0 / (2.0 * std::cos(w) + mu - z); };
  std::vector<double> cuts{0.0, kPi};
  const double c = 0.5 * (z.real() - mu);
  if (std::abs(c) < 1.0) {
    const double w0 = std::acos(c);
    const double width = std::max(std::abs(z.imag()), 1e-12);
    for (double k : {-300.0, -30.0, -3.0, -1.0, 0.0, 1.0, 3.0, 30.0, 300.0}) {
      const double p = w0 + k * width;
      if (p > 0.0 && p < kPi) cuts.push_back(p);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cplx sum = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] <= 0.0) continue;
    sum += GK::integrate(f, cuts[k], cuts[k + 1], 15, tol);
  }
  return sum / kPi;
}

CMat sandwiched_quadrature_oracle(cplx z, const FiberModel& model, double tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(build_fiber_matrix(model.theta(), model.N()));
  const CMat& Q = es.eigenvectors();
  CVec d(model.N());
  for (int k = 0; k < model.N(); ++k) d[k] = momentum_quadrature(z, es.eigenvalues()[k], tol);
  return model.Vh * Q * d.asDiagonal() * Q.adjoint() * model.Vh;
}

CMat boundary_sandwich_extrapolated(double lambda, const FiberModel& model, double eps0) {
  constexpr int K = 4;
  std::vector<double> eps(K);
  std::vector<CMat> table(K);
  for (int k = 0; k < K; ++k) {
    eps[k] = eps0 / std::pow(2.0, k);
    table[k] = sandwiched_quadrature_oracle(cplx(lambda, eps[k]), model);
  }
  // Neville recursion evaluated at eps = 0.
  for (int m = 1; m < K; ++m)
    for (int k = 0; k + m < K; ++k)
      table[k] = (eps[k + m] * table[k] - eps[k] * table[k + 1]) / (eps[k + m] - eps[k]);
  return table[0];
}

FiberVector bloch_transform(const LatticeFunction& psi, int N, double theta, int n_omega) {
  FiberVector out;
  out.theta = theta;
  out.N = N;
  long nmax = -1;
  for (const auto& [key, val] : psi) {
    if (key.second < 0) throw InvalidModel("lattice functions live on n >= 0");
    nmax = std::max(nmax, key.second);
  }
  out.sites.assign(static_cast<std::size_t>(nmax + 1), CVec::Zero(N));
  for (const auto& [key, val] : psi) {
    const long x = key.first;
    // x = k N + j with j in {1..N}
    const long k = static_cast<long>(std::floor(static_cast<double>(x - 1) / N));
    const long j = x - k * N;
    out.sites[static_cast<std::size_t>(key.second)][j - 1] += std::polar(1.0, -static_cast<double>(k) * theta) * val;
  }
  const double s2 = std::sqrt(2.0);
  for (int m = 0; m < n_omega; ++m) {
    const double w = kPi * (m + 0.5) / n_omega;
    CVec g = CVec::Zero(N);
    for (std::size_t n = 0; n < out.sites.size(); ++n)
      g += (n == 0 ? 1.0 : s2 * std::cos(static_cast<double>(n) * w)) * out.sites[n];
    out.omega.push_back(w);
    out.omega_values.push_back(std::move(g));
  }
  return out;
}

LatticeFunction apply_free_lattice(const LatticeFunction& psi) {
  LatticeFunction out;
  const double s2 = std::sqrt(2.0);
  for (const auto& [key, val] : psi) {
    const auto [x, n] = key;
    out[{x + 1, n}] += val;
    out[{x - 1, n}] += val;
    out[{x, n + 1}] += (n == 0 ? s2 : 1.0) * val;
    if (n >= 1) out[{x, n - 1}] += (n == 1 ? s2 : 1.0) * val;
  }
  return out;
}

}  // namespace halfspace
