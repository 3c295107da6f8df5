#include <doctest.h>

#include "halfspace/linalg.hpp"
#include "halfspace/resolvent.hpp"
#include "halfspace/threshold_expansions.hpp"
#include "halfspace/wave_operator.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace halfspace;
using halfspace::testing::max_abs;

namespace {

FiberModel scaled(const std::vector<double>& v, double t, double theta) {
  std::vector<double> w(v);
  for (auto& x : w) x *= t;
  return FiberModel(make_model(w, theta));
}

}  // namespace

TEST_CASE("grid and weights") {
  const auto g = make_grid(9, 2.0);
  CHECK(g.h == doctest::Approx(0.5));
  CHECK(g.s[4] == 0.0);
  CHECK_THROWS_AS(make_grid(8, 2.0), InvalidRun);
  CHECK_THROWS_AS(make_grid(3, 2.0), InvalidRun);

  CHECK(b_plus(0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(b_minus(0.0) == 0.0);
  for (double s = -20.0; s <= 20.0; s += 0.37) {
    const double bp = b_plus(s), bm = b_minus(s);
    CHECK(std::abs(bp * bp + bm * bm - 2.0) < 1e-13);
  }
}

TEST_CASE("V is an isometry up to quadrature error") {
  // f(lambda) = (4 - lambda^2)^{1/2} e^{-lambda^2} on a band centred at 0; ||f||^2 by a fine sum
  auto xi = [](double lam) { return cplx(std::sqrt(std::max(0.0, 4.0 - lam * lam)) * std::exp(-lam * lam)); };
  double exact = 0.0;
  const int M = 200000;
  for (int k = 0; k < M; ++k) {
    const double lam = -2.0 + 4.0 * (k + 0.5) / M;
    exact += std::norm(xi(lam)) * 4.0 / M;
  }
  double prev = 1e300;
  for (int n : {33, 65, 129}) {
    const auto g = make_grid(n, 8.0);
    const CVec f = rescale(g, 0.0, xi);
    const double err = std::abs(g.h * f.squaredNorm() - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("discrete symbols of the two convolution rules") {
  const double h = 1.0 / 32;
  for (double k : {0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0}) {
    CHECK(std::abs(csch_symbol(k, h, 80.0) - std::tanh(kPi * k)) < 1e-3);
    CHECK(std::abs(sech_symbol(k, h, 80.0) - 1.0 / std::cosh(kPi * k)) < 1e-3);
  }
}

TEST_CASE("Theta_eps converges to Pi on Gaussians") {
  const auto g = make_grid(513, 8.0);
  const PiOperator P = pi_operator(g);
  CHECK(max_abs(P.pi - P.leading - P.K) == 0.0);
  const double centres[5] = {-1.0, -0.3, 0.0, 0.6, 1.4};
  const double widths[5] = {0.8, 0.6, 1.0, 0.7, 0.9};
  const int probes[3] = {200, 256, 290};
  for (int b = 0; b < 5; ++b) {
    auto f = [&](double t) { return std::exp(-0.5 * std::pow((t - centres[b]) / widths[b], 2)); };
    CVec fv(g.n);
    for (int k = 0; k < g.n; ++k) fv[k] = f(g.s[k]);
    const CVec pf = P.pi * fv;
    double prev = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      double err = 0.0;
      for (int k : probes) err = std::max(err, std::abs(theta_epsilon_apply(f, g.s[k], eps) - pf[k]));
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("n-function: interior values, undefined pairs, endpoint limits") {
  const FiberModel m(make_model({1.0, -1.0, 2.0}, 1.0));
  const auto& eig = m.eig;
  // pick a pair whose difference set is nonempty on the low side
  int j = -1, jp = -1;
  for (int a = 0; a < 3 && j < 0; ++a)
    for (int b = 0; b < 3; ++b)
      if (eig.lambda[b] < eig.lambda[a] - 1e-6) {
        j = a;
        jp = b;
        break;
      }
  REQUIRE(j >= 0);
  const double lo = eig.band_lo(jp), e = eig.band_lo(j);
  const double mid = 0.5 * (lo + std::min(e, eig.band_hi(jp)));
  const CMat Mv = m_matrix_boundary(mid, m).value;
  const double b = beta_factor(mid, j, eig);
  const CMat direct = eig.P[j] * m.Vh * Mv * m.Vh * eig.P[jp] / (b * b);
  CHECK(max_abs(n_channel_function(mid, j, jp, m) - direct) < 1e-14);
  CHECK_THROWS_AS(n_channel_function(mid, j, j, m), UndefinedPair);
  CHECK_THROWS_AS(n_channel_function(eig.lambda[j], j, jp, m), PreconditionFailed);

  // the left endpoint lambda_j' - 2 against points approaching it
  const CMat end = n_channel_function(lo, j, jp, m);
  CHECK(std::isfinite(max_abs(end)));
  double prev = 1e300;
  for (double kap : {1e-2, 1e-3, 1e-4}) {
    const double d = max_abs(n_channel_function(lo + kap * kap, j, jp, m) - end);
    CHECK(d < 10.0 * kap);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("n-function at the touching point vanishes in the nondegenerate even case") {
  const FiberModel m(make_model({1.0, 2.0, 3.0, 4.0}, 0.0));
  const int top = 3, half = 1;
  const double at0 = max_abs(n_channel_function(0.0, top, half, m));
  CHECK(at0 < 1e-5);
  const double a = max_abs(n_channel_function(-1e-4, top, half, m));
  const double c = max_abs(n_channel_function(-1e-6, top, half, m));
  CHECK(a < 0.1);
  CHECK(c < 0.2 * a);  // O(kappa)
}

TEST_CASE("degeneracy report examples") {
  const auto d1 = degeneracy_report(FiberModel(make_model({1.0, 0.0, 1.0, 0.0}, 0.0)));
  CHECK(d1.applicable);
  CHECK_FALSE(d1.independent);
  CHECK(d1.special_form);
  CHECK(d1.conditions_agree);
  CHECK((d1.v_xi_half + d1.v_xi_top).norm() < 1e-12);

  const auto d2 = degeneracy_report(FiberModel(make_model({1.0, 2.0, 3.0, 4.0}, 0.0)));
  CHECK(d2.applicable);
  CHECK(d2.independent);
  CHECK_FALSE(d2.special_form);
  CHECK(d2.norm_top_half <= 1e-10);
  CHECK(d2.norm_half_top <= 1e-10);
  CHECK(d2.conditions_agree);

  const auto d3 = degeneracy_report(FiberModel(make_model({1.0, 2.0, 3.0, 4.0}, kPi / 3)));
  CHECK_FALSE(d3.applicable);
  CHECK_FALSE(d3.theta_zero);
  const auto d4 = degeneracy_report(FiberModel(make_model({1.0, 2.0, 3.0}, 0.0)));
  CHECK_FALSE(d4.applicable);
  CHECK_FALSE(d4.n_even);
}

TEST_CASE("degeneracy classification on random even models") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dn(1, 4);
  std::uniform_real_distribution<double> dv(-2.0, 2.0);
  int degenerate = 0;
  for (int t = 0; t < 50; ++t) {
    const int N = 2 * dn(rng);
    std::vector<double> v(N);
    for (auto& x : v) x = dv(rng);
    if (t % 3 == 1)
      for (int k = 1; k < N; k += 2) v[k] = 0.0;
    if (t % 3 == 2)
      for (int k = 0; k < N; k += 2) v[k] = 0.0;
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[t % 3 == 2 ? 1 : 0] = 1.0;
    const auto d = degeneracy_report(FiberModel(make_model(v, 0.0)));
    CHECK(d.conditions_agree);
    CHECK(d.special_form == !d.independent);
    degenerate += !d.independent;
  }
  CHECK(degenerate > 10);
}

TEST_CASE("kernel projections at the touching point") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dn(1, 3);
  std::uniform_real_distribution<double> dv(-2.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    const int N = 2 * dn(rng);
    std::vector<double> v(N);
    for (auto& x : v) x = dv(rng);
    if (t % 4 == 3)
      for (int k = 1; k < N; k += 2) v[k] = 0.0;
    const FiberModel m(make_model(v, 0.0));
    const auto d = degeneracy_report(m);
    const int dimL = d.independent ? 2 : 1;
    const auto ex = threshold_expansion(0.0, m);
    const double rank = ex.S0.trace().real();
    CHECK(std::abs(rank - (N - dimL)) < 1e-8);
    CHECK(max_abs(ex.S1) < 1e-10);
    CHECK(max_abs(ex.S2) < 1e-10);
  }
}

TEST_CASE("all terms vanish with the potential on smooth vectors") {
  // S(lambda) - 1 does not tend to 0 uniformly: at a threshold the limit is fixed for every
  // nonzero potential, so operator norms stay O(1) and only the action on vectors away from
  // the band edges shrinks.
  const auto g = make_grid(65, 6.0);
  const std::vector<double> v{1.0, -1.0, 2.0};
  double pl = 1e300, pk = 1e300, pr = 1e300;
  for (double t : {1.0, 0.1, 0.01, 0.001}) {
    const auto w = wave_operator(scaled(v, t, 1.0), g, false);
    const CVec f = band_limited_vector(g, 3, 5);
    const double l = (w.leading * f).norm() / f.norm();
    const double k = (w.K * f).norm() / f.norm();
    const double r = (w.remainder * f).norm() / f.norm();
    CHECK(l < pl);
    CHECK(k < pk);
    CHECK(r < pr);
    pl = l;
    pk = k;
    pr = r;
  }
  CHECK(pl < 0.05);
  CHECK(pk < 0.05);
  CHECK(pr < 0.05);
}

TEST_CASE("isometry improves under refinement") {
  const FiberModel m(make_model({1.0, -1.0, 2.0}, 1.0));
  double prev = 1e300;
  for (int n : {129, 257}) {
    const auto g = make_grid(n, 8.0);
    const auto w = wave_operator(m, g, false);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
      worst = std::max(worst, std::abs(isometry_ratio(w.assembled, band_limited_vector(g, m.N(), seed)) - 1.0));
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 0.06);
}

TEST_CASE("remainder rank grows with the window only in the degenerate case") {
  const double h = 1.0 / 16;
  std::vector<RescaledGrid> grids;
  for (double S : {4.0, 8.0}) grids.push_back(make_grid(static_cast<int>(2 * S / h) + 1, S));
  const auto deg = compactness_study(FiberModel(make_model({1.0, 0.0}, 0.0)), grids);
  const auto reg = compactness_study(FiberModel(make_model({0.8, -1.3}, 0.7)), grids);
  CHECK(deg[1].rank >= deg[0].rank + 3);
  CHECK(reg[1].rank <= reg[0].rank + 1);
  CHECK(deg[1].sigma1 < 1.5);
}

TEST_CASE("fiber scan") {
  const auto g = make_grid(33, 5.0);
  const auto scan = wave_operator_scan({1.0, 0.0}, 4, g);
  REQUIRE(scan.size() == 4);
  CHECK(scan[0].theta == 0.0);
  CHECK(scan[0].degenerate);
  CHECK_FALSE(scan[1].degenerate);
  CHECK(scan[2].theta == doctest::Approx(kPi));
  CHECK_THROWS_AS(wave_operator_scan({1.0, 0.0}, 0, g), InvalidRun);
}
