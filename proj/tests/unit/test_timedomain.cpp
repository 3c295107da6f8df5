#include <doctest.h>

#include "halfspace/scattering.hpp"
#include "halfspace/timedomain.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace halfspace;
using halfspace::testing::max_abs;

TEST_CASE("packet probe against the stationary S matrix") {
  const FiberModel m(make_model({1.0, -1.0}, kPi / 2));
  const auto p = timedomain_smatrix_probe(m, 0.0);
  const auto S = onshell_smatrix(0.0, m);
  REQUIRE(p.open_channels == S.open_channels);
  CHECK(max_abs(p.blocks - S.assembled) <= 5e-2);
  // energy conservation per incoming channel
  for (Eigen::Index k = 0; k < p.column_norms.size(); ++k) CHECK(std::abs(p.column_norms[k] - 1.0) <= 5e-2);
  CHECK(p.edge_mass <= 1e-6);
}

TEST_CASE("weak potential: transmission near one, no mixing") {
  const FiberModel m(make_model({1e-3, -1e-3}, kPi / 2));
  const auto p = timedomain_smatrix_probe(m, 0.3);
  REQUIRE(p.blocks.rows() == 2);
  CHECK(max_abs(p.blocks - CMat::Identity(2, 2)) <= 5e-2);
}

TEST_CASE("probe preconditions") {
  const FiberModel m(make_model({1.0, -1.0}, kPi / 2));
  TimeDomainConfig short_lattice;
  short_lattice.L = 500;
  short_lattice.T = 100;
  CHECK_THROWS_AS(timedomain_smatrix_probe(m, 0.0, short_lattice), InvalidRun);
  TimeDomainConfig long_time;
  long_time.T = 900;
  CHECK_THROWS_AS(timedomain_smatrix_probe(m, 0.0, long_time), InvalidRun);
  CHECK_THROWS_AS(timedomain_smatrix_probe(m, m.bands.thresholds[0] + 0.1, {}), PreconditionFailed);
  CHECK_THROWS_AS(timedomain_smatrix_probe(m, m.bands.spectrum_hi + 1.0, {}), PreconditionFailed);
}
