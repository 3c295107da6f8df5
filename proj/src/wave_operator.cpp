#include "halfspace/wave_operator.hpp"

#include "halfspace/linalg.hpp"
#include "halfspace/resolvent.hpp"
#include "halfspace/scattering.hpp"
#include "halfspace/spectral_points.hpp"
#include "halfspace/threshold_expansions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace halfspace {

namespace {

// Special points closer than this are handled through the expansion blocks (|kappa| <= 1e-2).
constexpr double kNearSpecial = 0.9e-4;
constexpr double kOnSpecial = 1e-12;

double sech(double x) { return 1.0 / std::cosh(x); }
double csch(double x) { return 1.0 / std::sinh(x); }

int nearest(double x, const std::vector<double>& pts, double r) {
  int best = -1;
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (std::abs(pts[k] - x) <= r && (best < 0 || std::abs(pts[k] - x) < std::abs(pts[best] - x)))
      best = static_cast<int>(k);
  return best;
}

// kappa with center - kappa^2 = x, in the quarter disc
cplx kappa_for(double center, double x) {
  return x <= center ? cplx(std::sqrt(center - x), 0.0) : cplx(0.0, -std::sqrt(x - center));
}

cplx integrate_complex(const std::function<cplx(double)>& g, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double re = GK::integrate([&](double t) { return g(t).real(); }, a, b, 15, 1e-10);
  const double im = GK::integrate([&](double t) { return g(t).imag(); }, a, b, 15, 1e-10);
  return {re, im};
}

// Four-point Lagrange stencil on the grid around t; false when t is off the grid.
bool stencil(const RescaledGrid& grid, double t, int& i0, double w[4]) {
  if (std::abs(t) > grid.s_max) return false;
  i0 = std::clamp(static_cast<int>(std::floor((t + grid.s_max) / grid.h)) - 1, 0, grid.n - 4);
  for (int q = 0; q < 4; ++q) {
    w[q] = 1.0;
    for (int r = 0; r < 4; ++r)
      if (r != q) w[q] *= (t - grid.s[i0 + r]) / (grid.s[i0 + q] - grid.s[i0 + r]);
  }
  return true;
}

}  // namespace

double RescaledGrid::lambda(const FiberModel& model, int c, int k) const {
  return model.eig.lambda[c] + 2.0 * std::tanh(s[k]);
}

double RescaledGrid::weight(int k) const { return std::sqrt(2.0) / std::cosh(s[k]); }

RescaledGrid make_grid(int n, double s_max) {
  if (n < 5 || n % 2 == 0) throw InvalidRun("grid size must be odd and at least 5");
  if (!(s_max > 0.0)) throw InvalidRun("grid half-width must be positive");
  RescaledGrid g;
  g.n = n;
  g.s_max = s_max;
  g.h = 2.0 * s_max / (n - 1);
  g.s.resize(n);
  const int mid = n / 2;
  for (int k = 0; k < n; ++k) g.s[k] = (k - mid) * g.h;
  return g;
}

CVec rescale(const RescaledGrid& grid, double lambda_c, const std::function<cplx(double)>& xi) {
  CVec out(grid.n);
  for (int k = 0; k < grid.n; ++k) out[k] = grid.weight(k) * xi(lambda_c + 2.0 * std::tanh(grid.s[k]));
  return out;
}

double b_plus(double s) { return 2.0 * std::cosh(s / 2) / std::sqrt(2.0 * std::cosh(s)); }
double b_minus(double s) { return 2.0 * std::sinh(s / 2) / std::sqrt(2.0 * std::cosh(s)); }

PiOperator pi_operator(const RescaledGrid& grid) {
  const int n = grid.n;
  const double h = grid.h;
  PiOperator P;
  P.tanh_pi_d = CMat::Zero(n, n);
  P.sech_pi_d = CMat::Zero(n, n);
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l) {
      const double u = grid.s[m] - grid.s[l];
      if ((m - l) % 2 != 0) P.tanh_pi_d(m, l) = kI * (2.0 * h / (2.0 * kPi)) * csch(u / 2);
      P.sech_pi_d(m, l) = h / (2.0 * kPi) * sech(u / 2);
    }
  RVec bp(n), bm(n), th(n);
  for (int k = 0; k < n; ++k) {
    bp[k] = b_plus(grid.s[k]);
    bm[k] = b_minus(grid.s[k]);
    th[k] = std::tanh(grid.s[k]);
  }
  const CMat I = CMat::Identity(n, n);
  const auto Bp = bp.cast<cplx>().asDiagonal();
  const auto Bm = bm.cast<cplx>().asDiagonal();
  const auto Bpi = bp.cwiseInverse().cast<cplx>().asDiagonal();
  const auto Th = th.cast<cplx>().asDiagonal();
  P.pi = -0.5 * (CMat(Bp * P.tanh_pi_d * Bpi) - kI * CMat(Bm * P.sech_pi_d * Bpi) - I);
  P.leading = -0.5 * (P.tanh_pi_d - kI * CMat(Th * P.sech_pi_d) - I);
  P.K = P.pi - P.leading;
  return P;
}

cplx csch_symbol(double k, double h, double u_max) {
  cplx acc = 0.0;
  for (long m = 1; m * h <= u_max; m += 2) acc += csch(m * h / 2) * (-2.0 * kI * std::sin(k * m * h));
  return kI / (2.0 * kPi) * 2.0 * h * acc;
}

double sech_symbol(double k, double h, double u_max) {
  double acc = 1.0;
  for (long m = 1; m * h <= u_max; ++m) acc += 2.0 * sech(m * h / 2) * std::cos(k * m * h);
  return h / (2.0 * kPi) * acc;
}

cplx theta_epsilon_apply(const std::function<double(double)>& f, double s, double eps) {
  // psi(mu) = beta(mu)^{-1} (V* f)(mu) in the t variable, mu = 2 tanh t
  auto psi = [&](double t) { return std::pow(std::cosh(t), 1.5) * f(t) / 2.0; };
  const double ps = psi(s);
  auto g = [&](double t) -> cplx {
    const double diff = 2.0 * std::sinh(t - s) / (std::cosh(t) * std::cosh(s));
    const double jac = 2.0 / (std::cosh(t) * std::cosh(t));
    return (psi(t) - ps) * jac / cplx(diff, eps);
  };
  const double w = std::min(1.0, 20.0 * eps * std::cosh(s) * std::cosh(s) / 2.0);
  const double T = 30.0;
  cplx J = integrate_complex(g, -T, s - w) + integrate_complex(g, s - w, s) + integrate_complex(g, s, s + w) +
           integrate_complex(g, s + w, T);
  const double lam = 2.0 * std::tanh(s);
  J += ps * std::log(cplx(2.0 - lam, eps) / cplx(-2.0 - lam, eps));
  return kI / kPi * std::pow(sech(s), 1.5) * J;
}

std::vector<double> special_points(const FiberModel& model) {
  std::vector<double> out = model.bands.thresholds;
  for (const auto& e : point_spectrum(model).entries)
    if (e.location == EigenLocation::embedded) out.push_back(e.lambda);
  std::sort(out.begin(), out.end());
  return out;
}

CMat n_channel_function(double lambda, int j, int jp, const FiberModel& model, const std::vector<double>& special) {
  const auto& eig = model.eig;
  if (std::abs(eig.lambda[j] - eig.lambda[jp]) <= kThresholdTol)
    throw UndefinedPair("n_{j,j'} needs lambda_j != lambda_j'");
  auto in_domain = [&](double x) { return eig.in_band(x, jp) && !eig.in_band(x, j); };
  const double tol = 1e-12;
  const bool closure = lambda >= eig.band_lo(jp) - tol && lambda <= eig.band_hi(jp) + tol &&
                       !(lambda > eig.band_lo(j) + tol && lambda < eig.band_hi(j) - tol);
  if (!closure) throw PreconditionFailed("lambda outside the closure of I_j' \\ I_j");

  const std::vector<double>& sp = special.empty() ? model.bands.thresholds : special;
  auto block = [&](double center, cplx kappa) {
    const double z = (center - kappa * kappa).real();
    const CMat B = m_channel_blocks(center, kappa, {j, jp}, model)[0][1];
    const double b = beta_factor(z, j, eig);
    return CMat(B / (b * b));
  };
  const int p = nearest(lambda, sp, kNearSpecial);
  if (p >= 0 && std::abs(lambda - sp[p]) <= kOnSpecial) {
    const double c = sp[p];
    const bool right = in_domain(c + 1e-3);
    const double t0 = 1e-6;
    auto at = [&](double t) { return block(c, right ? cplx(0.0, -t) : cplx(t, 0.0)); };
    return 2.0 * at(t0) - at(2.0 * t0);
  }
  if (p >= 0) return block(sp[p], kappa_for(sp[p], lambda));
  const CMat M = m_matrix_boundary(lambda, model).value;
  const double b = beta_factor(lambda, j, eig);
  return eig.P[j] * model.Vh * M * model.Vh * eig.P[jp] / (b * b);
}

cplx n_channel_scalar(double lambda, int j, int jp, const FiberModel& model, const std::vector<double>& special) {
  return model.eig.xi[j].dot(n_channel_function(lambda, j, jp, model, special) * model.eig.xi[jp]);
}

NodeSampler::NodeSampler(const FiberModel& m) : model(m), special(special_points(m)) {}

CMat NodeSampler::smatrix(double lambda, std::vector<int>& open) {
  const int p = nearest(lambda, special, kNearSpecial);
  OnShellSMatrix S;
  if (p >= 0) {
    double x = lambda;
    if (std::abs(x - special[p]) <= kOnSpecial) {
      x = special[p] + 1e-10;
      std::ostringstream os;
      os << "node " << lambda << " moved to " << x << " (special point)";
      log.push_back(os.str());
    }
    S = smatrix_expansion(special[p], kappa_for(special[p], x), model);
  } else {
    S = onshell_smatrix(lambda, model);
  }
  open = S.open_channels;
  return S.assembled - CMat::Identity(S.assembled.rows(), S.assembled.cols());
}

CMat smatrix_minus_one(const RescaledGrid& grid, NodeSampler& sampler) {
  const FiberModel& model = sampler.model;
  const int N = model.N(), n = grid.n;
  CMat A = CMat::Zero(static_cast<Eigen::Index>(N) * n, static_cast<Eigen::Index>(N) * n);
  std::vector<int> open;
  for (int c = 0; c < N; ++c)
    for (int k = 0; k < n; ++k) {
      const double lam = grid.lambda(model, c, k);
      const CMat D = sampler.smatrix(lam, open);
      const auto a = std::find(open.begin(), open.end(), c) - open.begin();
      const Eigen::Index row = static_cast<Eigen::Index>(c) * n + k;
      for (std::size_t b = 0; b < open.size(); ++b) {
        const cplx val = D(a, b);
        if (val == cplx(0.0)) continue;
        const int cp = open[b];
        if (cp == c) {
          A(row, row) += val;
          continue;
        }
        const double tp = std::atanh((lam - model.eig.lambda[cp]) / 2.0);
        // outside the sampled range of channel c' (NaN when a moved node sits on its edge)
        if (!(std::abs(tp) <= grid.s_max)) continue;

        const double fac = std::cosh(tp) / std::cosh(grid.s[k]);
        int i0 = 0;
        double w[4];
        stencil(grid, tp, i0, w);
        for (int q = 0; q < 4; ++q) A(row, static_cast<Eigen::Index>(cp) * n + i0 + q) += val * fac * w[q];
      }
    }
  return A;
}

MainTerm main_term(const FiberModel& model, const RescaledGrid& grid) {
  const int N = model.N(), n = grid.n;
  NodeSampler sampler(model);
  const CMat Sm = smatrix_minus_one(grid, sampler);
  const PiOperator P = pi_operator(grid);
  const CMat Ls = P.leading.adjoint(), Ks = P.K.adjoint();
  MainTerm out;
  out.leading.resize(Sm.rows(), Sm.cols());
  out.K.resize(Sm.rows(), Sm.cols());
  for (int c = 0; c < N; ++c) {
    const auto rows = Sm.middleRows(static_cast<Eigen::Index>(c) * n, n);
    out.leading.middleRows(static_cast<Eigen::Index>(c) * n, n) = Ls * rows;
    out.K.middleRows(static_cast<Eigen::Index>(c) * n, n) = Ks * rows;
  }
  out.log = std::move(sampler.log);
  return out;
}

namespace {

// xi_j* vhalf M(lambda + i0) vhalf xi_j' = beta_j^2 n_{j,j'}, without the division by beta_j^2.
cplx sandwich_scalar(double lambda, int j, int jp, const FiberModel& model, const std::vector<double>& sp) {
  const int p = nearest(lambda, sp, kNearSpecial);
  CMat B;
  if (p >= 0) {
    double x = lambda;
    if (std::abs(x - sp[p]) <= kOnSpecial) x = sp[p] + (model.eig.in_band(sp[p] + 1e-3, jp) ? 1e-12 : -1e-12);
    B = m_channel_blocks(sp[p], kappa_for(sp[p], x), {j, jp}, model)[0][1];
  } else {
    const CMat M = m_matrix_boundary(lambda, model).value;
    B = model.eig.P[j] * model.Vh * M * model.Vh * model.eig.P[jp];
  }
  return model.eig.xi[j].dot(B * model.eig.xi[jp]);
}

struct QuadNode {
  double t;       // channel j' variable
  double weight;  // dt
};

// Quadrature over I_j' \ I_j in the t variable of channel j'. When the edge e of I_j lies inside
// I_j' the kernel 1 / (mu - lambda) concentrates at e on the scale of e - mu, far below the grid
// step, so the nodes are pulled towards e with t = t_e -/+ log(1 + e^y), uniform in y.
std::vector<QuadNode> remainder_nodes(const RescaledGrid& grid, int j, int jp, const FiberModel& model) {
  const auto& eig = model.eig;
  const bool below = eig.lambda[jp] < eig.lambda[j];  // domain lies below I_j
  const double e = below ? eig.band_lo(j) : eig.band_hi(j);
  const double x = (e - eig.lambda[jp]) / 2.0;
  std::vector<QuadNode> out;
  if (std::abs(x) >= 1.0 - 1e-12) {
    // e is the far edge of I_j': the whole band, where the grid already clusters
    for (int l = 0; l < grid.n; ++l) out.push_back({grid.s[l], grid.h});
    return out;
  }
  const double te = std::atanh(x);
  const double span = below ? te + grid.s_max : grid.s_max - te;
  if (span <= 0.0) return out;
  for (double y = -24.0;; y += grid.h) {
    const double d = std::log1p(std::exp(y));
    if (d > span) break;
    const double dd = 1.0 / (1.0 + std::exp(-y));
    out.push_back({below ? te - d : te + d, grid.h * dd});
  }
  return out;
}

}  // namespace

CMat remainder_term(const FiberModel& model, const RescaledGrid& grid) {
  const int N = model.N(), n = grid.n;
  const auto& eig = model.eig;
  const std::vector<double> sp = special_points(model);
  CMat R = CMat::Zero(static_cast<Eigen::Index>(N) * n, static_cast<Eigen::Index>(N) * n);
  RVec sh(n);
  for (int k = 0; k < n; ++k) sh[k] = std::sqrt(sech(grid.s[k]));
  for (int j = 0; j < N; ++j)
    for (int jp = 0; jp < N; ++jp) {
      if (std::abs(eig.lambda[j] - eig.lambda[jp]) <= kThresholdTol) continue;
      for (const QuadNode& q : remainder_nodes(grid, j, jp, model)) {
        const double lam = eig.lambda[jp] + 2.0 * std::tanh(q.t);
        if (eig.in_band(lam, j)) continue;
        int i0 = 0;
        double w[4];
        if (!stencil(grid, q.t, i0, w)) continue;
        const cplx c = sandwich_scalar(lam, j, jp, model, sp) * (-q.weight / kPi) * std::sqrt(sech(q.t));
        for (int m = 0; m < n; ++m) {
          const double mu = grid.lambda(model, j, m);
          const cplx entry = c * sh[m] / (mu - lam);
          for (int r = 0; r < 4; ++r)
            R(static_cast<Eigen::Index>(j) * n + m, static_cast<Eigen::Index>(jp) * n + i0 + r) += entry * w[r];
        }
      }
    }
  return R;
}

DegeneracyReport degeneracy_report(const FiberModel& model, double tol) {
  DegeneracyReport r;
  const int N = model.N();
  const double th = model.theta();
  r.theta_zero = std::abs(th) <= 1e-12 || std::abs(th - 2.0 * kPi) <= 1e-12;
  r.n_even = N % 2 == 0;
  r.applicable = r.theta_zero && r.n_even;
  if (!r.applicable) return r;
  const int top = N - 1, half = N / 2 - 1;  // slots of the channels labelled N and N/2
  r.v_xi_top = model.Vh * model.eig.xi[top];
  r.v_xi_half = model.Vh * model.eig.xi[half];
  CMat cols(N, 2);
  cols.col(0) = r.v_xi_top;
  cols.col(1) = r.v_xi_half;
  const RVec sv = singular_values(cols);
  r.sigma_ratio = sv[0] > 0.0 ? sv[1] / sv[0] : 0.0;
  r.independent = r.sigma_ratio > 1e-8;

  // 2 I0(0) = vhalf P_N vhalf + i vhalf P_{N/2} vhalf; its range is span{v xi_N, v xi_{N/2}}
  const CMat I0 = 0.5 * (model.vPv[top] + kI * model.vPv[half]);
  Eigen::JacobiSVD<CMat> svd(cols, Eigen::ComputeThinU);
  const int rank = (svd.singularValues().array() > 1e-8 * svd.singularValues()[0]).count();
  const CMat Qb = svd.matrixU().leftCols(rank);
  const CMat I0inv = inverse_on_range(I0, projection_from_basis(Qb, N));
  r.norm_top_half = opnorm(model.eig.P[top] * model.Vh * I0inv * model.Vh * model.eig.P[half]);
  r.norm_half_top = opnorm(model.eig.P[half] * model.Vh * I0inv * model.Vh * model.eig.P[top]);
  r.conditions_agree = (r.independent == (r.norm_top_half <= tol)) && (r.independent == (r.norm_half_top <= tol));

  bool odd_zero = true, even_zero = true;
  for (int k = 0; k < N; ++k) (k % 2 == 0 ? odd_zero : even_zero) &= model.spec.v[k] == 0.0;  // k = 0 is label 1
  r.special_form = odd_zero || even_zero;
  return r;
}

WaveOpDiscretization wave_operator(const FiberModel& model, const RescaledGrid& grid, bool spectra) {
  WaveOpDiscretization w;
  w.grid = grid;
  MainTerm mt = main_term(model, grid);
  w.leading = std::move(mt.leading);
  w.K = std::move(mt.K);
  w.log = std::move(mt.log);
  w.remainder = remainder_term(model, grid);
  w.assembled = w.leading + w.K + w.remainder;
  if (spectra) {
    w.sv_leading = singular_values(w.leading);
    w.sv_K = singular_values(w.K);
    w.sv_remainder = singular_values(w.remainder);
    w.sv_assembled = singular_values(w.assembled);
  }
  return w;
}

double compactness_ratio(const RVec& sv, int n) {
  const int idx = (n + 3) / 4;
  if (sv.size() < idx || sv[0] == 0.0) return 0.0;
  return sv[idx - 1] / sv[0];
}

int numerical_rank(const RVec& sv, double rel) {
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  return static_cast<int>((sv.array() > rel * sv[0]).count());
}

std::vector<CompactnessPoint> compactness_study(const FiberModel& model, const std::vector<RescaledGrid>& grids) {
  std::vector<CompactnessPoint> out;
  for (const auto& g : grids) {
    const RVec sv = singular_values(remainder_term(model, g));
    out.push_back({g.n, g.s_max, sv.size() ? sv[0] : 0.0, compactness_ratio(sv, g.n), numerical_rank(sv, 1e-2)});
  }
  return out;
}

CVec band_limited_vector(const RescaledGrid& grid, int N, std::uint64_t seed, int bumps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-4.0, 4.0);
  std::normal_distribution<double> amp(0.0, 1.0);
  CVec f = CVec::Zero(static_cast<Eigen::Index>(N) * grid.n);
  for (int c = 0; c < N; ++c)
    for (int b = 0; b < bumps; ++b) {
      const double s0 = centre(rng);
      const cplx a(amp(rng), amp(rng));
      for (int k = 0; k < grid.n; ++k) {
        const double x = (grid.s[k] - s0) / 0.7;
        f[static_cast<Eigen::Index>(c) * grid.n + k] += a * std::exp(-0.5 * x * x);
      }
    }
  return f;
}

double isometry_ratio(const CMat& W, const CVec& f) { return (f + W * f).norm() / f.norm(); }

double intertwining_defect(const CMat& W, const RescaledGrid& grid, const FiberModel& model, const CVec& f) {
  const int N = model.N(), n = grid.n;
  CVec lam(static_cast<Eigen::Index>(N) * n);
  for (int c = 0; c < N; ++c)
    for (int k = 0; k < n; ++k) lam[static_cast<Eigen::Index>(c) * n + k] = grid.lambda(model, c, k);
  const CVec Wf = W * f;
  const CVec d = lam.cwiseProduct(Wf) - W * lam.cwiseProduct(f);
  return d.norm() / f.norm();
}

namespace {

double norm_estimate(const CMat& A) {
  if (A.size() == 0) return 0.0;
  CVec x = CVec::Ones(A.cols());
  double s = 0.0;
  for (int it = 0; it < 60; ++it) {
    const CVec y = A.adjoint() * (A * x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    s = std::sqrt(ny / x.norm());
    x = y / ny;
  }
  return s;
}

}  // namespace

std::vector<FiberSample> wave_operator_scan(const std::vector<double>& v, int M, const RescaledGrid& grid,
                                            std::uint64_t seed) {
  if (M < 1) throw InvalidRun("theta grid needs at least one point");
  std::vector<FiberSample> out;
  for (int k = 0; k < M; ++k) {
    FiberSample s;
    s.theta = 2.0 * kPi * k / M;
    const FiberModel model(make_model(v, s.theta));
    const auto w = wave_operator(model, grid, false);
    s.norm_leading = norm_estimate(w.leading);
    s.norm_K = norm_estimate(w.K);
    s.norm_remainder = norm_estimate(w.remainder);
    s.isometry = isometry_ratio(w.assembled, band_limited_vector(grid, model.N(), seed));
    const auto d = degeneracy_report(model);
    s.degenerate = d.applicable && !d.independent;
    out.push_back(s);
  }
  return out;
}

}  // namespace halfspace
