#include <doctest.h>

#include "halfspace/fiber_model.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace halfspace;
using halfspace::testing::max_abs;

TEST_CASE("fiber matrix for period two") {
  for (double th : {0.0, 0.4, 1.7, kPi, 5.9}) {
    const CMat A = build_fiber_matrix(th, 2);
    CHECK(std::abs(A(0, 0)) == 0.0);
    CHECK(std::abs(A(1, 1)) == 0.0);
    CHECK(std::abs(A(0, 1) - (1.0 + std::polar(1.0, -th))) < 1e-15);
    CHECK(std::abs(A(1, 0) - (1.0 + std::polar(1.0, th))) < 1e-15);
  }
  CHECK(max_abs(build_fiber_matrix(kPi, 2)) < 1e-15);
}

TEST_CASE("fiber matrix at theta zero is a circulant") {
  const CMat A = build_fiber_matrix(0.0, 3);
  CMat expected(3, 3);
  expected << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  CHECK(max_abs(A - expected) == 0.0);
  CHECK(max_abs(A - A.adjoint()) == 0.0);
  CHECK_THROWS_AS(build_fiber_matrix(0.3, 1), InvalidModel);
}

TEST_CASE("eigensystem examples") {
  const double th = 1.1;
  auto e = fiber_eigensystem(th, 2);
  CHECK(e.lambda[0] == doctest::Approx(-2.0 * std::cos(th / 2)).epsilon(1e-14));
  CHECK(e.lambda[1] == doctest::Approx(2.0 * std::cos(th / 2)).epsilon(1e-14));

  e = fiber_eigensystem(0.0, 2);
  CMat P1(2, 2), P2(2, 2);
  P1 << 0.5, -0.5, -0.5, 0.5;
  P2 << 0.5, 0.5, 0.5, 0.5;
  CHECK(max_abs(e.P[0] - P1) < 1e-15);
  CHECK(max_abs(e.P[1] - P2) < 1e-15);

  e = fiber_eigensystem(0.0, 4);
  CHECK(std::abs(e.lambda[0]) < 1e-15);
  CHECK(std::abs(e.lambda[2]) < 1e-15);
  CHECK(e.lambda[1] == doctest::Approx(-2.0));
  CHECK(e.lambda[3] == doctest::Approx(2.0));
}

TEST_CASE("eigensystem properties on random fibers") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dt(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 2 + trial % 15;
    const double th = dt(rng);
    const auto e = fiber_eigensystem(th, N);
    const CMat A = build_fiber_matrix(th, N);
    CMat sum = CMat::Zero(N, N);
    for (int c = 0; c < N; ++c) {
      CHECK(max_abs(A * e.xi[c] - e.lambda[c] * e.xi[c]) <= 1e-12);
      CHECK(std::abs(e.xi[c].norm() - 1.0) < 1e-14);
      CHECK(max_abs(e.P[c] * e.P[c] - e.P[c]) < 1e-14);
      for (int d = c + 1; d < N; ++d) CHECK(max_abs(e.P[c] * e.P[d]) < 1e-14);
      sum += e.P[c];
    }
    CHECK(max_abs(sum - CMat::Identity(N, N)) <= 1e-12);
  }
}

TEST_CASE("theta = 0 and theta = 2 pi share the sorted spectrum") {
  for (int N = 2; N <= 12; ++N) {
    auto a = fiber_eigensystem(0.0, N).lambda;
    auto b = fiber_eigensystem(2.0 * kPi, N).lambda;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (int k = 0; k < N; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-13);
  }
}

namespace {

// Coincident (1-based) pairs listed case by case for the three special angles.
std::set<std::pair<int, int>> expected_coincidences(int N, int which) {
  std::set<std::pair<int, int>> s;
  auto add = [&](int a, int b) {
    if (a != b && a >= 1 && b >= 1 && a <= N && b <= N) s.insert({std::min(a, b), std::max(a, b)});
  };
  if (which == 0) {
    for (int j = 1; j <= N - 1; ++j) add(j, N - j);
  } else if (which == 1) {
    add(N, N - 1);
    if (N >= 4)
      for (int j = 1; j <= N - 2; ++j) add(j, N - j - 1);
  } else {
    if (N >= 3) add(N - 2, N);
    if (N >= 5)
      for (int j = 1; j <= N - 3; ++j) add(j, N - j - 2);
  }
  return s;
}

}  // namespace

TEST_CASE("degeneracy table matches the special-angle cases") {
  const double angles[3] = {0.0, kPi, 2.0 * kPi};
  for (int N = 2; N <= 12; ++N) {
    for (int w = 0; w < 3; ++w) {
      const auto b = band_structure(fiber_eigensystem(angles[w], N));
      std::set<std::pair<int, int>> got;
      for (auto [c, d] : b.coincident) got.insert({c + 1, d + 1});
      CHECK_MESSAGE(got == expected_coincidences(N, w), "N=" << N << " angle#" << w);
    }
    CHECK(band_structure(fiber_eigensystem(0.77, N)).coincident.empty());
  }
}

TEST_CASE("band structure examples") {
  auto b = band_structure(make_model({1.0, 1.0}, 0.0));
  CHECK(b.spectrum_lo == doctest::Approx(-4.0));
  CHECK(b.spectrum_hi == doctest::Approx(4.0));
  CHECK(b.bands[0].first == doctest::Approx(-4.0));
  CHECK(b.bands[0].second == doctest::Approx(0.0));
  CHECK(b.bands[1].first == doctest::Approx(0.0));
  CHECK(b.thresholds.size() == 3);

  b = band_structure(make_model({1.0, 1.0}, kPi));
  CHECK(b.bands[0].first == doctest::Approx(-2.0));
  CHECK(b.bands[1].second == doctest::Approx(2.0));
  CHECK(b.spectrum_lo == doctest::Approx(-2.0));
  CHECK(b.thresholds.size() == 2);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto bs = band_structure(halfspace::testing::random_model(rng, 2, 16));
    CHECK(bs.spectrum_lo >= -4.0 - 1e-14);
    CHECK(bs.spectrum_hi <= 4.0 + 1e-14);
  }
}

TEST_CASE("split potential") {
  auto f = split_potential({0.0, -1.0});
  CHECK(f.u[0] == 1.0);
  CHECK(f.u[1] == -1.0);
  CHECK(f.vhalf[0] == 0.0);
  CHECK(f.vhalf[1] == 1.0);
  f = split_potential({4.0, 9.0});
  CHECK(f.u[0] == 1.0);
  CHECK(f.u[1] == 1.0);
  CHECK(f.vhalf[0] == 2.0);
  CHECK(f.vhalf[1] == 3.0);
  CHECK_THROWS_AS(split_potential({0.0, 0.0}), InvalidModel);
  CHECK_THROWS_AS(make_model({0.0, 0.0}, 0.1), InvalidModel);
  CHECK_THROWS_AS(make_model({1.0}, 0.1), InvalidModel);
  CHECK_THROWS_AS(make_model({1.0, 2.0}, 7.0), InvalidModel);

  const std::vector<double> v{0.3, -2.5, 0.0, 7.25};
  f = split_potential(v);
  for (int k = 0; k < 4; ++k) CHECK(f.u[k] * f.vhalf[k] * f.vhalf[k] == doctest::Approx(v[k]).epsilon(1e-15));
}

TEST_CASE("beta factor") {
  const auto e = fiber_eigensystem(0.0, 4);  // lambda_1 = 0
  CHECK(beta_factor(e.lambda[0], 0, e) == doctest::Approx(std::sqrt(2.0)));
  CHECK(beta_factor(e.lambda[0] + 2.0, 0, e) < 1e-3);  // quartic root of a rounding-level gap
  CHECK(beta_factor(3.0 + e.lambda[0], 0, e) == doctest::Approx(std::pow(5.0, 0.25)).epsilon(1e-6));
  CHECK(std::pow(5.0, 0.25) == doctest::Approx(1.4953).epsilon(1e-4));
  CHECK(beta_factor(cplx(0.3, 0.7), 2, e) >= 0.0);
}
