#include "halfspace/fiber_model.hpp"

#include <algorithm>
#include <cmath>

namespace halfspace {

void validate_model(const ModelSpec& spec) {
  if (spec.N < 2) throw InvalidModel("period must be at least 2");
  if (static_cast<int>(spec.v.size()) != spec.N)
    throw InvalidModel("potential length must equal the period");
  if (std::none_of(spec.v.begin(), spec.v.end(), [](double x) { return x != 0.0; }))
    throw InvalidModel("potential is identically zero");
  if (!(spec.theta >= 0.0 && spec.theta <= 2.0 * kPi))
    throw InvalidModel("theta must lie in [0, 2pi]");
  for (double x : spec.v)
    if (!std::isfinite(x)) throw InvalidModel("potential values must be finite");
}

ModelSpec make_model(std::vector<double> v, double theta) {
  ModelSpec s{static_cast<int>(v.size()), std::move(v), theta};
  validate_model(s);
  return s;
}

PotentialFactors split_potential(const std::vector<double>& v) {
  if (v.empty() || std::none_of(v.begin(), v.end(), [](double x) { return x != 0.0; }))
    throw InvalidModel("potential is identically zero");
  const auto n = static_cast<Eigen::Index>(v.size());
  PotentialFactors f{RVec(n), RVec(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    f.u[k] = v[k] < 0.0 ? -1.0 : 1.0;
    f.vhalf[k] = std::sqrt(std::abs(v[k]));
  }
  return f;
}

CMat build_fiber_matrix(double theta, int N) {
  if (N < 2) throw InvalidModel("period must be at least 2");
  CMat A = CMat::Zero(N, N);
  for (int k = 0; k + 1 < N; ++k) {
    A(k, k + 1) += 1.0;
    A(k + 1, k) += 1.0;
  }
  A(0, N - 1) += std::polar(1.0, -theta);
  A(N - 1, 0) += std::polar(1.0, theta);
  return A;
}

FiberEigensystem fiber_eigensystem(double theta, int N) {
  if (N < 2) throw InvalidModel("period must be at least 2");
  FiberEigensystem e;
  e.theta = theta;
  e.N = N;
  const double norm = 1.0 / std::sqrt(static_cast<double>(N));
  for (int j = 1; j <= N; ++j) {
    const double phase = (theta + 2.0 * kPi * j) / N;
    e.lambda.push_back(2.0 * std::cos(phase));
    CVec xi(N);
    for (int k = 1; k <= N; ++k) xi[k - 1] = norm * std::polar(1.0, phase * k);
    e.P.push_back(xi * xi.adjoint());
    e.xi.push_back(std::move(xi));
  }
  return e;
}

BandStructure band_structure(const FiberEigensystem& eig) {
  BandStructure b;
  std::vector<double> t;
  for (int c = 0; c < eig.N; ++c) {
    b.bands.emplace_back(eig.band_lo(c), eig.band_hi(c));
    t.push_back(eig.band_lo(c));
    t.push_back(eig.band_hi(c));
  }
  std::sort(t.begin(), t.end());
  for (double x : t)
    if (b.thresholds.empty() || x - b.thresholds.back() > kThresholdTol) b.thresholds.push_back(x);
  const auto [lo, hi] = std::minmax_element(eig.lambda.begin(), eig.lambda.end());
  b.spectrum_lo = *lo - 2.0;
  b.spectrum_hi = *hi + 2.0;
  for (int c = 0; c < eig.N; ++c)
    for (int d = c + 1; d < eig.N; ++d)
      if (std::abs(eig.lambda[c] - eig.lambda[d]) <= kThresholdTol) b.coincident.emplace_back(c, d);
  return b;
}

BandStructure band_structure(const ModelSpec& spec) {
  validate_model(spec);
  return band_structure(fiber_eigensystem(spec.theta, spec.N));
}

double beta_factor(cplx z, int c, const FiberEigensystem& eig) {
  const cplx w = z - eig.lambda.at(c);
  return std::pow(std::abs(w * w - 4.0), 0.25);
}

FiberModel::FiberModel(ModelSpec s) : spec(std::move(s)) {
  validate_model(spec);
  pot = split_potential(spec.v);
  eig = fiber_eigensystem(spec.theta, spec.N);
  bands = band_structure(eig);
  U = pot.u.cast<cplx>().asDiagonal();
  Vh = pot.vhalf.cast<cplx>().asDiagonal();
  for (const auto& P : eig.P) vPv.push_back(Vh * P * Vh);
}

double FiberModel::max_abs_v() const {
  double m = 0.0;
  for (double x : spec.v) m = std::max(m, std::abs(x));
  return m;
}

bool FiberModel::is_threshold(double x, double tol) const { return !edge_channels(x, tol).empty(); }

std::vector<int> FiberModel::edge_channels(double x, double tol) const {
  std::vector<int> out;
  for (int c = 0; c < spec.N; ++c)
    if (std::abs(std::abs(x - eig.lambda[c]) - 2.0) <= tol) out.push_back(c);
  return out;
}

std::vector<int> FiberModel::open_channels(double x) const {
  std::vector<int> out;
  for (int c = 0; c < spec.N; ++c)
    if (eig.in_band(x, c) && std::abs(std::abs(x - eig.lambda[c]) - 2.0) > kThresholdTol) out.push_back(c);
  return out;
}

}  // namespace halfspace
