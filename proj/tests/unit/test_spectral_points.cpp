#include <doctest.h>

#include "halfspace/lattice.hpp"
#include "halfspace/spectral_points.hpp"
#include "test_support.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>

using namespace halfspace;
using halfspace::testing::max_abs;

namespace {

// Scalar bound-state condition for period two with v = (0, -a^2), below the spectrum.
double two_site_condition(double lambda, double theta, double a2) {
  const double c = 2.0 * std::cos(theta / 2);
  return 1.0 / std::sqrt((lambda + c) * (lambda + c) - 4.0) + 1.0 / std::sqrt((lambda - c) * (lambda - c) - 4.0) -
         2.0 / a2;
}

double two_site_root(double theta, double a2, double lo, double hi) {
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve([&](double x) { return two_site_condition(x, theta, a2); }, lo, hi,
                                             boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

}  // namespace

TEST_CASE("bound state of the two-site example") {
  const FiberModel m(make_model({0.0, -1.0}, 0.0));
  const double root = two_site_root(0.0, 1.0, -4.08, -4.07);
  // 30-digit root of the same condition, frozen
  CHECK(std::abs(root - (-4.0736530371873963)) < 1e-12);

  const auto kt = eigenvalue_test(root, m);
  CHECK(kt.kernel_dim == 1);
  CHECK(kt.open_channels.empty());
  CHECK(eigenvalue_test(-10.0, m).kernel_dim == 0);
  CHECK_THROWS_AS(eigenvalue_test(m.bands.spectrum_lo, m), ThresholdPoint);

  const auto ps = point_spectrum(m);
  REQUIRE(ps.entries.size() == 1);
  CHECK(ps.entries[0].location == EigenLocation::below);
  CHECK(ps.entries[0].multiplicity == 1);
  CHECK(ps.entries[0].kernel_dim == 1);
  CHECK(std::abs(ps.entries[0].lambda - root) < 1e-9);

  const auto lat = truncated_spectrum_oracle(2000, m);
  REQUIRE(lat.size() == 1);
  CHECK(std::abs(lat[0] - ps.entries[0].lambda) < 1e-6);
}

TEST_CASE("strong repulsive pair has two states above the bands") {
  for (double th : {0.0, kPi / 2, 2.0}) {
    const FiberModel m(make_model({8.0, 8.0}, th));
    const auto ps = point_spectrum(m);
    int above = 0;
    for (const auto& e : ps.entries) above += e.location == EigenLocation::above ? e.multiplicity : 0;
    CHECK(above >= 2);
  }
}

TEST_CASE("criterion matrix is Hermitian off the thresholds") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> dl(-9.0, 9.0);
  for (int k = 0; k < 200; ++k) {
    const FiberModel m(halfspace::testing::random_model(rng, 2, 7, 3.0));
    const double lam = dl(rng);
    const CMat T = criterion_matrix(lam, m);
    CHECK(max_abs(T - T.adjoint()) <= 1e-12);
  }
}

TEST_CASE("point spectrum agrees with the truncated lattice") {
  std::mt19937_64 rng(67);
  for (int k = 0; k < 12; ++k) {
    const FiberModel m(halfspace::testing::random_model(rng, 2, 5, 4.0));
    const auto ps = point_spectrum(m);
    std::vector<double> ours;
    for (const auto& e : ps.entries) {
      const bool outside = e.lambda < m.bands.spectrum_lo - 1e-3 || e.lambda > m.bands.spectrum_hi + 1e-3;
      if (!outside) continue;
      CHECK(e.multiplicity == e.kernel_dim);
      for (int r = 0; r < e.multiplicity; ++r) ours.push_back(e.lambda);
    }
    const auto lat = truncated_spectrum_oracle(2000, m);
    REQUIRE(lat.size() == ours.size());
    for (std::size_t i = 0; i < ours.size(); ++i) CHECK(std::abs(lat[i] - ours[i]) < 1e-6);
  }
}

TEST_CASE("embedded eigenvalues") {
  {
    const FiberModel m(make_model({1.0, 1.0}, 0.0));
    const double expected = std::sqrt(5.0) - 2.0;
    const auto kt = eigenvalue_test(expected, m);
    CHECK(kt.kernel_dim == 1);
    CHECK(kt.open_channels.size() == 1);
    const auto ps = point_spectrum(m);
    int found = 0;
    for (const auto& e : ps.entries)
      if (e.location == EigenLocation::embedded) {
        ++found;
        CHECK(std::abs(e.lambda - expected) < 1e-9);
        CHECK(e.multiplicity == 1);
      }
    CHECK(found == 1);
  }
  {
    const FiberModel m(make_model({4.0, 4.0, 4.0, 4.0}, 0.0));
    const double expected = 2.0 * std::sqrt(5.0) - 2.0;
    CHECK(eigenvalue_test(expected, m).kernel_dim >= 1);
    bool hit = false;
    for (const auto& e : point_spectrum(m).entries)
      if (e.location == EigenLocation::embedded && std::abs(e.lambda - expected) < 1e-9) hit = true;
    CHECK(hit);
  }
}

TEST_CASE("tiny potential is stable under tolerance halving") {
  const FiberModel m(make_model({1e-6, 1e-6}, 0.7));
  SearchOptions a, b;
  b.tol = a.tol / 2;
  b.grid_step = a.grid_step / 2;
  CHECK(point_spectrum(m, a).entries.size() == point_spectrum(m, b).entries.size());
}

TEST_CASE("surface dispersion of the two-site example") {
  const auto d = surface_dispersion({0.0, -1.0}, 64);
  REQUIRE(d.thetas.size() == 64);
  for (double th : d.thetas) {
    int below = 0;
    for (const auto& p : d.points)
      if (p.theta == th && p.location == EigenLocation::below) {
        ++below;
        CHECK(p.lambda < -2.0 * std::cos(th / 2) - 2.0);
        CHECK(p.branch == 0);
        CHECK(std::abs(p.lambda - two_site_root(th, 1.0, -20.0, -2.0 * std::abs(std::cos(th / 2)) - 2.0 - 1e-12)) <
              1e-8);
      }
    CHECK(below == 1);
  }
  CHECK_FALSE(d.ambiguous);

  const auto one = surface_dispersion({0.3, -2.0, 1.0}, 1);
  CHECK(one.thetas.size() == 1);
  CHECK_NOTHROW(surface_dispersion({0.0, 1.0}, 5));
  CHECK_NOTHROW(surface_dispersion({0.0, -1.0}, 5));
}
