#pragma once

#include "halfspace/fiber_model.hpp"

#include <functional>
#include <string>
#include <vector>

// Discretization of W_- - 1 in the rescaled energy representation. Each channel c carries a
// function g_c(s) sampled on a common s-grid, with lambda = lambda_c + 2 tanh(s); operators act
// on the stacked vector (g_0, ..., g_{N-1}) of length N * n, slot c * n + k.

namespace halfspace {

struct RescaledGrid {
  int n = 0;
  double s_max = 0.0;
  double h = 0.0;
  std::vector<double> s;

  double lambda(const FiberModel& model, int c, int k) const;
  // 2^{1/2} / cosh(s_k), the factor of V_c.
  double weight(int k) const;
};

// n odd (s = 0 is a node), uniform on [-s_max, s_max].
RescaledGrid make_grid(int n = 513, double s_max = 8.0);

// (V_c xi)(s_k) for xi given as a function of lambda on band c.
CVec rescale(const RescaledGrid& grid, double lambda_c, const std::function<cplx(double)>& xi);

double b_plus(double s);
double b_minus(double s);

// tanh(pi D) is (i / 2 pi) PV csch((s - t) / 2), discretized with the alternating rule
// (odd offsets only, weight 2h) which is exact on the odd singular part; cosh(pi D)^{-1} is
// (1 / 2 pi) sech((s - t) / 2) with the trapezoid rule.
struct PiOperator {
  CMat tanh_pi_d;
  CMat sech_pi_d;
  CMat pi;       // -1/2 (b+ tanh(pi D) b+^{-1} - i b- cosh(pi D)^{-1} b+^{-1} - 1)
  CMat leading;  // -1/2 (tanh(pi D) - i tanh(X) cosh(pi D)^{-1} - 1)
  CMat K;        // pi - leading
};

PiOperator pi_operator(const RescaledGrid& grid);

// Discrete symbols of the two convolution rules on |u| <= u_max; they approximate tanh(pi k)
// and 1 / cosh(pi k).
cplx csch_symbol(double k, double h, double u_max);
double sech_symbol(double k, double h, double u_max);

// (V Theta_eps V* f)(s) by adaptive quadrature; band centre at 0, f real and decaying.
cplx theta_epsilon_apply(const std::function<double(double)>& f, double s, double eps);

// Thresholds and the eigenvalues of H^theta inside the spectrum, sorted.
std::vector<double> special_points(const FiberModel& model);

// beta_j(lambda)^{-2} P_j vhalf M(lambda + i0) vhalf P_j' on the closure of I_j' \ I_j.
// Within 1e-4 of a threshold or eigenvalue the expansion blocks are used; at such a point
// itself the value is the one-sided limit, extrapolated from kappa = 1e-6 and 2e-6.
CMat n_channel_function(double lambda, int j, int jp, const FiberModel& model,
                        const std::vector<double>& special = {});
cplx n_channel_scalar(double lambda, int j, int jp, const FiberModel& model,
                      const std::vector<double>& special = {});

// S(lambda) at a real node; nodes on a special point are moved by 1e-10 and the move is logged.
struct NodeSampler {
  const FiberModel& model;
  std::vector<double> special;
  std::vector<std::string> log;

  explicit NodeSampler(const FiberModel& m);
  CMat smatrix(double lambda, std::vector<int>& open);
};

// V (S(X) - 1) V* on the grid, with four-point Lagrange interpolation between channel grids.
CMat smatrix_minus_one(const RescaledGrid& grid, NodeSampler& sampler);

struct MainTerm {
  CMat leading;
  CMat K;
  std::vector<std::string> log;
};

MainTerm main_term(const FiberModel& model, const RescaledGrid& grid);

CMat remainder_term(const FiberModel& model, const RescaledGrid& grid);

struct DegeneracyReport {
  bool applicable = false;  // theta = 0 and N even
  bool theta_zero = false;
  bool n_even = false;
  CVec v_xi_top;   // vhalf xi_N (constant components)
  CVec v_xi_half;  // vhalf xi_{N/2} (alternating components)
  double sigma_ratio = 0.0;  // sigma_min / sigma_max of the two columns
  bool independent = true;
  double norm_top_half = 0.0;  // || P_N vhalf I0(0)^{-1} vhalf P_{N/2} ||
  double norm_half_top = 0.0;  // || P_{N/2} vhalf I0(0)^{-1} vhalf P_N ||
  bool conditions_agree = true;
  bool special_form = false;  // potential supported on one parity class
};

DegeneracyReport degeneracy_report(const FiberModel& model, double tol = 1e-10);

struct WaveOpDiscretization {
  RescaledGrid grid;
  CMat leading;
  CMat K;
  CMat remainder;
  CMat assembled;
  RVec sv_leading, sv_K, sv_remainder, sv_assembled;
  std::vector<std::string> log;
};

WaveOpDiscretization wave_operator(const FiberModel& model, const RescaledGrid& grid, bool spectra = true);

// sigma_{ceil(n/4)} / sigma_1 from a descending singular value list.
double compactness_ratio(const RVec& sv, int n);

// Number of singular values above rel * sigma_1.
int numerical_rank(const RVec& sv, double rel);

struct CompactnessPoint {
  int n = 0;
  double s_max = 0.0;
  double sigma1 = 0.0;
  double ratio = 0.0;  // compactness_ratio
  int rank = 0;        // numerical_rank at 1e-2
};

// Remainder spectra over a family of grids. With h fixed and s_max doubling, a compact remainder
// keeps its numerical rank while a non-compact one gains rank in proportion to the window.
std::vector<CompactnessPoint> compactness_study(const FiberModel& model, const std::vector<RescaledGrid>& grids);

// Smooth random vector: per channel a sum of `bumps` Gaussians of width 0.7 centred in [-4, 4].
CVec band_limited_vector(const RescaledGrid& grid, int N, std::uint64_t seed, int bumps = 6);

// || (1 + W) f || / || f ||.
double isometry_ratio(const CMat& W, const CVec& f);

// || (Lambda (1 + W) - (1 + W) Lambda) f || / || f || with Lambda multiplication by the energy.
double intertwining_defect(const CMat& W, const RescaledGrid& grid, const FiberModel& model, const CVec& f);

struct FiberSample {
  double theta = 0.0;
  double norm_leading = 0.0;
  double norm_K = 0.0;
  double norm_remainder = 0.0;
  double isometry = 0.0;
  bool degenerate = false;
};

// theta_k = 2 pi k / M, k = 0..M-1.
std::vector<FiberSample> wave_operator_scan(const std::vector<double>& v, int M, const RescaledGrid& grid,
                                            std::uint64_t seed = 7);

}  // namespace halfspace
