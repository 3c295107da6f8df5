#include <doctest.h>

#include "halfspace/linalg.hpp"
#include "halfspace/resolvent.hpp"
#include "halfspace/spectral_points.hpp"
#include "halfspace/threshold_expansions.hpp"
#include "hp_oracle.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace halfspace;
using halfspace::testing::max_abs;
using halfspace::testing::random_matrix;

namespace {

int rank_of(const CMat& S) { return static_cast<int>(std::lround(S.trace().real())); }

KappaJet poly_jet(const std::vector<CMat>& a, cplx kappa) {
  // order-4 jet of the cubic a0 + a1 k + a2 k^2 + a3 k^3 with zero remainder
  KappaJet j{kappa, a, CMat::Zero(a[0].rows(), a[0].cols())};
  return j;
}

// Every threshold of a model, for sweeping the chain over many configurations.
std::vector<double> thresholds(const FiberModel& m) { return m.bands.thresholds; }

CMat direct_m(cplx z, const FiberModel& m) {
  return z.imag() == 0.0 ? m_matrix_boundary(z.real(), m).value : m_matrix(z, m).value;
}

}  // namespace

TEST_CASE("jet product and inverse reproduce the exact matrices") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CMat> a, b;
    for (int k = 0; k < 4; ++k) {
      a.push_back(random_matrix(rng, 3, 3));
      b.push_back(random_matrix(rng, 3, 3));
    }
    a[0] += 4.0 * CMat::Identity(3, 3);
    for (cplx kappa : {cplx(0.0), cplx(0.03, -0.02), cplx(0.2, 0.0)}) {
      const KappaJet A = poly_jet(a, kappa), B = poly_jet(b, kappa);
      CHECK(max_abs((A * B).value() - A.value() * B.value()) < 1e-12);
      const KappaJet Ai = jet_inverse(A);
      CHECK(max_abs(Ai.value() - A.value().inverse()) < 1e-12);
      const CMat a0i = a[0].inverse();
      CHECK(max_abs(Ai.c[1] + a0i * a[1] * a0i) < 1e-12);
      CHECK(max_abs(jet_tail(A).value() * kappa - (A.value() - a[0])) < 1e-12);
      CHECK(max_abs(jet_times_kappa(A).value() - kappa * A.value()) < 1e-12);
      CHECK(max_abs(jet_reduce(A, 2).value() - A.value()) < 1e-12);
    }
  }
}

TEST_CASE("scalar inverse-square-root jets") {
  for (cplx kappa : {cplx(1e-3, 0.0), cplx(0.0, -2e-2), cplx(0.05, -0.05), cplx(0.3, -0.1)}) {
    const ScalarJet s = inverse_sqrt_jet(0.5, -0.25, 0.0, kappa);
    CHECK(std::abs(s.value(kappa) - 1.0 / std::sqrt(4.0 + kappa * kappa)) < 1e-15);
    const ScalarJet r = inverse_sqrt_jet(0.5 * kI, 0.25, 0.0, kappa);
    CHECK(std::abs(r.value(kappa) - kI / std::sqrt(4.0 - kappa * kappa)) < 1e-15);
    const double w = 3.1, Y = w * w - 4.0;
    const cplx m0 = -1.0 / std::sqrt(Y);
    const ScalarJet m = inverse_sqrt_jet(m0, 2.0 * w / Y, -1.0 / Y, kappa);
    const cplx z = w - kappa * kappa;
    CHECK(std::abs(m.value(kappa) + 1.0 / std::sqrt(z * z - 4.0)) < 1e-14);
  }
  const ScalarJet s0 = inverse_sqrt_jet(0.5, -0.25, 0.0, 0.0);
  CHECK(std::abs(s0.c[2] + 1.0 / 16) < 1e-16);
  CHECK(std::abs(s0.r - 3.0 / 256) < 1e-16);
  CHECK(std::abs(inverse_sqrt_increment(1e-9) - 0.5) < 1e-9);
  CHECK_THROWS_AS(inverse_sqrt_jet(1.0, 1.0, 0.0, 1.0), RadiusExceeded);
}

TEST_CASE("inversion step examples") {
  CMat A0 = CMat::Zero(1, 1), S = CMat::Identity(1, 1);
  const cplx z(1e-2, 3e-3);
  auto one = [](cplx) { return CMat(CMat::Identity(1, 1)); };
  JnStep st = jn_inverse_step(A0, one, S, z);
  CHECK(std::abs(st.B(0, 0) - 1.0 / (1.0 + z)) < 1e-12);
  CHECK(std::abs(st.A_inv(0, 0) - 1.0 / z) < 1e-9);

  std::mt19937_64 rng(73);
  CMat M = random_matrix(rng, 3, 3) + 5.0 * CMat::Identity(3, 3);
  auto a1 = [&](cplx) { return CMat(0.3 * CMat::Identity(3, 3)); };
  st = jn_inverse_step(M, a1, CMat::Zero(3, 3), z);
  CHECK(max_abs(st.A_inv - (M + z * 0.3 * CMat::Identity(3, 3)).inverse()) < 1e-12);

  // Hermitian 4 x 4 with a one-dimensional kernel
  const CMat U = halfspace::testing::random_unitary(rng, 4);
  RVec d(4);
  d << 0.0, 1.3, -0.7, 2.2;
  const CMat H = U * d.cast<cplx>().asDiagonal() * U.adjoint();
  const CMat K = U.col(0) * U.col(0).adjoint();
  auto id = [](cplx) { return CMat(CMat::Identity(4, 4)); };
  st = jn_inverse_step(H, id, K, 1e-3);
  CHECK_FALSE(st.singular);
  CHECK(max_abs(st.A_inv - (H + 1e-3 * CMat::Identity(4, 4)).inverse()) < 1e-10 * max_abs(st.A_inv));

  // with A0 invertible, S (A0 + S)^{-1} S = S fails for any nonzero S
  const CMat M4 = random_matrix(rng, 4, 4) + 5.0 * CMat::Identity(4, 4);
  CHECK_THROWS_AS(jn_inverse_step(M4, id, K, 1e-3), PreconditionFailed);
  CHECK_THROWS_AS(jn_inverse_step(M, id, K, 1e-3), PreconditionFailed);
  CHECK_THROWS_AS(jn_inverse_step(H, id, K, 10.0), RadiusExceeded);
}

TEST_CASE("kernel projection examples") {
  CHECK(max_abs(numerical_kernel_projection(CMat::Identity(3, 3))) < 1e-15);
  CHECK(max_abs(numerical_kernel_projection(CMat::Zero(3, 3)) - CMat::Identity(3, 3)) < 1e-15);
  CMat D = CMat::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 1e-14;
  CMat e2 = CMat::Zero(2, 2);
  e2(1, 1) = 1.0;
  const CMat P = numerical_kernel_projection(D);
  CHECK(max_abs(P - e2) < 1e-15);
  CHECK(max_abs(P * P - P) < 1e-12);
  CHECK(max_abs(P - P.adjoint()) < 1e-12);
}

TEST_CASE("threshold data examples") {
  {
    const FiberModel m(make_model({1.0, 1.0}, 0.0));
    const auto d = threshold_expansion(4.0, m);
    REQUIRE(d.edge_channels.size() == 1);
    CHECK(d.edge_channels[0] == 1);
    CHECK(max_abs(d.I0_0 - 0.5 * kI * m.vPv[1]) < 1e-14);
    CMat expected(2, 2);
    expected << 0.5, -0.5, -0.5, 0.5;
    CHECK(max_abs(d.S0 - expected) < 1e-12);
  }
  {
    const FiberModel m(make_model({1.0, -1.0}, 0.0));
    const auto d = threshold_expansion(0.0, m);
    CHECK(d.edge_channels.size() == 2);
    CHECK(max_abs(d.I0_0 - (0.5 * m.vPv[1] + 0.5 * kI * m.vPv[0])) < 1e-14);
    CHECK(rank_of(d.S0) == 0);
    CHECK(rank_of(d.S1) == 0);
    CHECK(rank_of(d.S2) == 0);
  }
  // exceptional corner: theta = 0, N even, lambda = 0
  for (int N : {4, 6}) {
    std::vector<double> v;
    for (int k = 0; k < N; ++k) v.push_back(0.7 + 0.31 * k * (k % 2 ? -1 : 1));
    const FiberModel m(make_model(v, 0.0));
    const auto d = threshold_expansion(0.0, m);
    const CVec a = m.Vh * m.eig.xi[N / 2 - 1], b = m.Vh * m.eig.xi[N - 1];
    CMat L(N, 2);
    L << a, b;
    const CMat PL = projection_from_basis(L.householderQr().householderQ() * CMat::Identity(N, 2), N);
    CHECK(max_abs(d.S0 - (CMat::Identity(N, N) - PL)) < 1e-10);
    CHECK(rank_of(d.S1) == 0);
    CHECK(rank_of(d.S2) == 0);
  }
  const FiberModel m(make_model({1.0, 2.0}, 0.4));
  CHECK_THROWS_AS(threshold_expansion(0.123, m), WrongEntryPoint);
}

TEST_CASE("threshold chain invariants on random models") {
  std::mt19937_64 rng(79);
  int nontrivial_s1 = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const FiberModel m(halfspace::testing::random_model(rng, 2, 6, 4.0));
    for (double lam : thresholds(m)) {
      const auto d = threshold_expansion(lam, m);
      CHECK(max_abs(d.S0 * d.S1 - d.S1) < 1e-10);
      CHECK(max_abs(d.S1 * d.S0 - d.S1) < 1e-10);
      CHECK(max_abs(d.S1 * d.S2 - d.S2) < 1e-10);
      CHECK(max_abs(d.S2 * d.S1 - d.S2) < 1e-10);
      CHECK(max_abs(d.Q0 * d.S0 - d.S0) < 1e-10);
      CHECK(max_abs(d.Q1 * d.S1 - d.S1) < 1e-10);
      CHECK(max_abs(d.Q2 * d.S2 - d.S2) < 1e-10);
      for (int c : d.edge_channels) CHECK(max_abs(m.eig.P[c] * m.Vh * d.S0) <= 1e-10);
      for (int c : m.open_channels(lam)) CHECK(max_abs(m.eig.P[c] * m.Vh * d.S1) <= 1e-10);
      CHECK(max_abs(d.M1_0 * d.S2) <= 1e-10);
      CHECK(min_eigenvalue_hermitian(imag_part(d.I0_0)) >= -1e-12);
      CHECK(min_eigenvalue_hermitian(imag_part(d.I1_0)) >= -1e-12);
      CHECK(min_eigenvalue_hermitian(imag_part(d.I2_0)) >= -1e-12);
      CHECK(d.I3_invertible);
      nontrivial_s1 += rank_of(d.S1) > 0;
    }
  }
  MESSAGE("thresholds with S1 != 0: " << nontrivial_s1);
}

TEST_CASE("chain with nontrivial S1 and S2") {
  const double a = -std::sqrt(32.0);
  const FiberModel m(make_model({a, a}, 0.0));
  const auto d = threshold_expansion(-4.0, m);
  CHECK(rank_of(d.S0) == 1);
  CHECK(rank_of(d.S1) == 1);
  CHECK(rank_of(d.S2) == 1);
  CHECK(d.I3_invertible);
  CHECK(max_abs(d.M1_0 * d.S2) <= 1e-10);
  CHECK_THROWS_AS(m_extended(-4.0, 0.0, m), SingularMatrix);
}

TEST_CASE("extended M reproduces the direct inverse") {
  using halfspace::testing::hp_cplx;
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> lr(-4.0, -2.0), ph(-0.5 * kPi + 0.05, -0.05);
  std::vector<FiberModel> models{FiberModel(make_model({-std::sqrt(32.0), -std::sqrt(32.0)}, 0.0)),
                                 FiberModel(make_model({1.0, 1.0}, 0.0)), FiberModel(make_model({1.0, -1.0}, 0.0))};
  for (int k = 0; k < 12; ++k) models.emplace_back(halfspace::testing::random_model(rng, 2, 5, 3.0));
  for (const auto& m : models) {
    for (double lam : thresholds(m)) {
      const auto lam_hp = halfspace::testing::hp_threshold(lam, m.theta(), m.N());
      for (int s = 0; s < 4; ++s) {
        const cplx kappa = std::polar(std::pow(10.0, lr(rng)) * 0.99, ph(rng));
        const hp_cplx k(kappa.real(), kappa.imag());
        const CMat ref = halfspace::testing::hp_m_matrix(hp_cplx(lam_hp) - k * k, m.spec.v, m.theta());
        const CMat ext = m_extended(lam, kappa, m);
        CHECK_MESSAGE(max_abs(ext - ref) <= 1e-8 * max_abs(ref), "lambda " << lam << " kappa " << kappa);
        // the double-precision direct inverse agrees wherever it is well conditioned
        if (std::abs(kappa) > 5e-3) CHECK(max_abs(ext - m_matrix(lam - kappa * kappa, m).value) <= 1e-6 * max_abs(ref));
      }
    }
  }
}

TEST_CASE("commutators scale linearly in kappa") {
  std::vector<FiberModel> models{FiberModel(make_model({-std::sqrt(32.0), -std::sqrt(32.0)}, 0.0))};
  std::mt19937_64 rng(89);
  for (int k = 0; k < 6; ++k) models.emplace_back(halfspace::testing::random_model(rng, 2, 5, 3.0));
  for (const auto& m : models) {
    for (double lam : thresholds(m)) {
      const auto d = threshold_expansion(lam, m);
      const auto proj = d.projections();
      for (int l = 0; l <= 2; ++l)
        for (int mm = 0; mm <= l; ++mm) {
          const double cp = max_abs(d.Cprime[l][mm]);
          std::vector<double> ratio;
          for (double kap = 1e-2; kap >= 1e-5; kap /= 2) {
            const auto ch = threshold_chain(lam, kap, m, &proj);
            const double c = max_abs(commutator_jet(ch, l, mm).value());
            ratio.push_back(c / kap);
            if (l == 2 && mm == 0) CHECK(c / (kap * kap * kap) < 1e6);
          }
          if (cp < 1e-8) {
            for (double r : ratio) CHECK(r < 1e-6 + 1e-2 * ratio.front() + 1e-6);
            continue;
          }
          for (double r : ratio) CHECK((r / cp < 2.0 && r / cp > 0.5));
          // one-sided difference quotient against the jet coefficient
          const auto ch = threshold_chain(lam, 1e-5, m, &proj);
          CHECK(max_abs(commutator_jet(ch, l, mm).value() / 1e-5 - d.Cprime[l][mm]) < 1e-3 * std::max(1.0, cp));
        }
    }
  }
}

TEST_CASE("eigenvalue expansion") {
  const FiberModel b(make_model({0.0, -1.0}, 0.0));
  const double e = point_spectrum(b).entries.at(0).lambda;
  const auto d = eigenvalue_expansion(e, b);
  CHECK_FALSE(d.regular);
  CHECK(rank_of(d.S) == 1);
  CHECK_THROWS_AS(m_extended(e, 0.0, b), SingularMatrix);

  const FiberModel m(make_model({1.0, -1.0}, kPi / 2));
  const auto r = eigenvalue_expansion(0.3, m);
  CHECK(r.regular);
  CHECK(max_abs(m_extended(0.3, 0.0, m) - m_matrix_boundary(0.3, m).value) < 1e-10);
  const double outside = m.bands.spectrum_hi + 0.05;
  CHECK(eigenvalue_expansion(outside, m).regular);
  CHECK(max_abs(m_extended(outside, 0.0, m) - m_matrix_boundary(outside, m).value) < 1e-10);

  // T1(0) against a difference quotient of the exact T1
  CHECK(max_abs(t1_matrix(0.3, 1e-4, m) - r.T1_0) < 1e-6);

  // eigenvalue case away from kappa = 0 matches the direct inverse
  const FiberModel emb(make_model({1.0, 1.0}, 0.0));
  const double le = std::sqrt(5.0) - 2.0;
  CHECK_FALSE(eigenvalue_expansion(le, emb).regular);
  for (cplx kappa : {cplx(1e-3, 0.0), cplx(2e-3, -1e-3), cplx(0.0, -4e-3)}) {
    const CMat direct = direct_m(le - kappa * kappa, emb);
    CHECK(max_abs(m_extended(le, kappa, emb) - direct) <= 1e-8 * max_abs(direct));
  }
  CHECK_THROWS_AS(m_extended(le, cplx(-1e-3, 0.0), emb), PreconditionFailed);
  CHECK_THROWS_AS(m_extended(le, cplx(0.5, 0.0), emb), RadiusExceeded);
}

TEST_CASE("regular threshold: both approach paths reach M(lambda, 0)") {
  const FiberModel m(make_model({1.0, -1.0}, 0.0));
  const CMat M0 = m_extended(0.0, 0.0, m);
  for (double t : {1e-3, 1e-4, 1e-5}) {
    CHECK(max_abs(m_extended(0.0, t, m) - M0) < 50.0 * t);
    CHECK(max_abs(m_extended(0.0, cplx(0.0, -t), m) - M0) < 50.0 * t);
  }
}
