#pragma once

#include "halfspace/common.hpp"

#include <utility>
#include <vector>

// Channels are stored 0-based: array slot c holds the channel labelled j = c + 1.
// All user-facing output (JSON, CSV, CLI) uses the 1-based label.

namespace halfspace {

struct ModelSpec {
  int N = 0;
  std::vector<double> v;
  double theta = 0.0;
};

ModelSpec make_model(std::vector<double> v, double theta);
void validate_model(const ModelSpec& spec);

struct PotentialFactors {
  RVec u;      // diagonal of sgn(diag v), +1 where v >= 0
  RVec vhalf;  // diagonal of |diag v|^{1/2}
};

PotentialFactors split_potential(const std::vector<double>& v);

CMat build_fiber_matrix(double theta, int N);

struct FiberEigensystem {
  double theta = 0.0;
  int N = 0;
  std::vector<double> lambda;
  std::vector<CVec> xi;
  std::vector<CMat> P;

  double band_lo(int c) const { return lambda[c] - 2.0; }
  double band_hi(int c) const { return lambda[c] + 2.0; }
  bool in_band(double x, int c) const { return x > band_lo(c) && x < band_hi(c); }
};

FiberEigensystem fiber_eigensystem(double theta, int N);

inline constexpr double kThresholdTol = 1e-12;

struct BandStructure {
  std::vector<std::pair<double, double>> bands;
  std::vector<double> thresholds;  // sorted, duplicates collapsed
  double spectrum_lo = 0.0;
  double spectrum_hi = 0.0;
  std::vector<std::pair<int, int>> coincident;  // c < c' with equal eigenvalues
};

BandStructure band_structure(const ModelSpec& spec);
BandStructure band_structure(const FiberEigensystem& eig);

double beta_factor(cplx z, int c, const FiberEigensystem& eig);

// Everything downstream needs: factors, eigensystem and the sandwiched projections vhalf P_c vhalf.
struct FiberModel {
  ModelSpec spec;
  PotentialFactors pot;
  FiberEigensystem eig;
  BandStructure bands;
  CMat U;
  CMat Vh;
  std::vector<CMat> vPv;

  explicit FiberModel(ModelSpec s);

  int N() const { return spec.N; }
  double theta() const { return spec.theta; }
  double max_abs_v() const;

  bool is_threshold(double x, double tol = kThresholdTol) const;
  // Channels with |x - lambda_c| = 2 within tol.
  std::vector<int> edge_channels(double x, double tol = kThresholdTol) const;
  std::vector<int> open_channels(double x) const;
};

}  // namespace halfspace
