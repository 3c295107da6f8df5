#pragma once

#include "halfspace/fiber_model.hpp"

#include <string>
#include <vector>

namespace halfspace {

struct KernelTestResult {
  double lambda = 0.0;
  CMat matrix;  // u + real three-sum, Hermitian
  int kernel_dim = 0;
  CMat kernel_basis;  // orthonormal columns
  std::vector<int> open_channels;
  double sigma_min = 0.0;  // of the stacked criterion, relative to its largest singular value
};

// u + sum_{lambda < lambda_c - 2} vPv / beta^2 - sum_{lambda > lambda_c + 2} vPv / beta^2.
CMat criterion_matrix(double lambda, const FiberModel& model);

// Criterion matrix stacked with the rows xi_c* vhalf of every open channel; its kernel is
// ker(criterion) intersected with ker(P_c vhalf) over the open channels.
CMat stacked_criterion(double lambda, const FiberModel& model);

KernelTestResult eigenvalue_test(double lambda, const FiberModel& model, double tol = 1e-8);

enum class EigenLocation { below, above, gap, embedded };
std::string location_name(EigenLocation l);

struct SpectrumEntry {
  double lambda = 0.0;
  int multiplicity = 0;
  EigenLocation location = EigenLocation::below;
  int kernel_dim = 0;  // from eigenvalue_test at the refined point
};

struct SearchOptions {
  double grid_step = 1e-3;        // embedded scan
  double tol = 1e-10;             // absolute refinement tolerance
  double edge_offset = 1e-9;      // evaluation offset from band edges for the counting search
  double exclusion = 1e-6;        // embedded scan stays this far from thresholds
  double candidate_sigma = 1e-2;  // grid minima below this are refined
  double accept_sigma = 1e-7;     // refined minima below this are eigenvalues
};

struct SearchInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool embedded = false;
  int found = 0;
  int refinements = 0;
};

struct PointSpectrum {
  double theta = 0.0;
  std::vector<SpectrumEntry> entries;  // sorted by lambda
  std::vector<SearchInterval> intervals;
};

// Number of negative eigenvalues of the criterion matrix; for lambda off sigma(H0) this is
// nonincreasing in lambda and drops by one at each eigenvalue of H^theta.
int criterion_negative_count(double lambda, const FiberModel& model);

PointSpectrum point_spectrum(const FiberModel& model, const SearchOptions& opt = {});

struct DispersionPoint {
  double theta = 0.0;
  int branch = 0;
  double lambda = 0.0;
  int multiplicity = 0;
  EigenLocation location = EigenLocation::below;
};

struct Dispersion {
  std::vector<double> thetas;
  std::vector<DispersionPoint> points;
  int branches = 0;
  bool ambiguous = false;  // some matching step could not separate candidate branches
  std::vector<std::string> warnings;
};

// theta_k = 2 pi k / (M - 1), k = 0..M-1 (theta = 0 alone for M = 1).
Dispersion surface_dispersion(const std::vector<double>& v, int M, const SearchOptions& opt = {});

}  // namespace halfspace
