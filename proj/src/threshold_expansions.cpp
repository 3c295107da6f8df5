#include "halfspace/threshold_expansions.hpp"

#include "halfspace/linalg.hpp"
#include "halfspace/resolvent.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace halfspace {

JnStep jn_inverse_step(const CMat& A0, const std::function<CMat(cplx)>& A1, const CMat& S, cplx z) {
  if (A0.rows() != A0.cols() || S.rows() != A0.rows() || S.cols() != A0.cols())
    throw PreconditionFailed("A0 and S must be square of the same size");
  const CMat A0S = A0 + S;
  if (rcond(A0S) < kSingularRcond) throw PreconditionFailed("A0 + S is not invertible");
  const CMat Q = A0S.partialPivLu().inverse();
  if (opnorm(S * Q * S - S) > 1e-10 * std::max(1.0, opnorm(Q)))
    throw PreconditionFailed("S (A0 + S)^{-1} S differs from S");
  const CMat a1 = A1(z);
  JnStep out;
  out.series_ratio = std::abs(z) * opnorm(a1 * Q);
  if (out.series_ratio >= 1.0) throw RadiusExceeded("|z| beyond the geometric-series radius");
  const CMat AzS = A0S + z * a1;
  const CMat QS = AzS.partialPivLu().inverse();
  // S Q S = S and Q - QS = z QS a1 Q turn (S - S QS S) / z into a form without cancellation
  out.B = S * QS * a1 * Q * S;
  if (S.norm() < 0.5) {
    out.A_inv = QS;
    return out;
  }
  // B restricted to the range of S
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (S + S.adjoint()));
  const CMat W = es.eigenvectors().rightCols((es.eigenvalues().array() > 0.5).count());
  const CMat Br = W.adjoint() * out.B * W;
  if (rcond(Br) < kSingularRcond) {
    out.singular = true;
    return out;
  }
  const CMat Binv = W * Br.inverse() * W.adjoint();
  out.A_inv = QS + QS * S * Binv * S * QS / z;
  return out;
}

KappaJet i0_jet(double lambda, cplx kappa, const FiberModel& model) {
  const int N = model.N();
  const auto edges = model.edge_channels(lambda);
  if (edges.empty()) throw WrongEntryPoint("lambda is not a threshold");
  KappaJet edge{kappa, std::vector<CMat>(4, CMat::Zero(N, N)), CMat::Zero(N, N)};
  KappaJet m1{kappa, std::vector<CMat>(4, CMat::Zero(N, N)), CMat::Zero(N, N)};
  m1.c[0] = model.U;
  auto accumulate = [](KappaJet& J, const ScalarJet& s, const CMat& vpv) {
    for (int k = 0; k < 4; ++k) J.c[k] += s.c[k] * vpv;
    J.r += s.r * vpv;
  };
  for (int c = 0; c < N; ++c) {
    const bool is_edge = std::find(edges.begin(), edges.end(), c) != edges.end();
    if (is_edge) {
      const bool left = lambda < model.eig.lambda[c];
      // -1/vartheta: (4 + kappa^2)^{-1/2} at a left edge, i (4 - kappa^2)^{-1/2} at a right edge
      const ScalarJet s = left ? inverse_sqrt_jet(0.5, -0.25, 0.0, kappa) : inverse_sqrt_jet(0.5 * kI, 0.25, 0.0, kappa);
      accumulate(edge, s, model.vPv[c]);
    } else {
      const double w = lambda - model.eig.lambda[c];
      const double Y = w * w - 4.0;
      const cplx m0 = boundary_momentum(lambda, model.eig.lambda[c]);
      accumulate(m1, inverse_sqrt_jet(m0, 2.0 * w / Y, -1.0 / Y, kappa), model.vPv[c]);
    }
  }
  return edge + jet_times_kappa(m1);
}

namespace {

CMat identity(Eigen::Index n) { return CMat::Identity(n, n); }

}  // namespace

ThresholdChain threshold_chain(double lambda, cplx kappa, const FiberModel& model,
                               const std::vector<CMat>* projections) {
  ThresholdChain ch;
  ch.lambda = lambda;
  ch.kappa = kappa;
  for (int c : model.edge_channels(lambda)) (lambda < model.eig.lambda[c] ? ch.left_edge : ch.right_edge).push_back(c);
  const Eigen::Index N = model.N();

  KappaJet A = i0_jet(lambda, kappa, model);
  CMat Pi = identity(N);
  for (int l = 0; l <= 3; ++l) {
    CMat S;
    if (projections && l < static_cast<int>(projections->size()))
      S = (*projections)[l];
    else
      S = numerical_kernel_projection(A.c[0]);
    ChainLevel lev{Pi, S, A, jet_inverse(A + jet_constant(S, A.order(), kappa))};
    if (l < 3) {
      // (S - S Q S) / kappa with Q = (A + S)^{-1} reduces to S A_tail Q S because A S = 0 at kappa = 0
      const KappaJet B = S * (jet_tail(A) * lev.Q) * S;
      A = B + jet_constant(identity(N) - S, B.order(), kappa);
      Pi = S;
    }
    ch.levels.push_back(std::move(lev));
  }
  return ch;
}

KappaJet commutator_jet(const ThresholdChain& ch, int l, int m) {
  if (!(l >= m && m >= 0 && l <= 2)) throw PreconditionFailed("commutator indices need 2 >= l >= m >= 0");
  const auto& lev = ch.levels[m];
  return jet_commutator(ch.levels[l].S, lev.Pi * (lev.Q * lev.Pi));
}

ThresholdExpansionData threshold_expansion(double lambda, const FiberModel& model) {
  if (!model.is_threshold(lambda)) throw WrongEntryPoint("threshold_expansion needs lambda in the threshold set");
  const ThresholdChain ch = threshold_chain(lambda, 0.0, model);
  ThresholdExpansionData d;
  d.lambda = lambda;
  d.edge_channels = model.edge_channels(lambda);
  d.left_edge = ch.left_edge;
  d.right_edge = ch.right_edge;
  d.M1_0 = model.U;
  for (int c = 0; c < model.N(); ++c)
    if (std::find(d.edge_channels.begin(), d.edge_channels.end(), c) == d.edge_channels.end())
      d.M1_0 += boundary_momentum(lambda, model.eig.lambda[c]) * model.vPv[c];

  d.S0 = ch.levels[0].S;
  d.S1 = ch.levels[1].S;
  d.S2 = ch.levels[2].S;
  d.I0_0 = ch.levels[0].A.c[0];
  d.I1_0 = d.S0 * ch.levels[1].A.c[0] * d.S0;
  d.I2_0 = d.S1 * ch.levels[2].A.c[0] * d.S1;
  d.I3_0 = d.S2 * ch.levels[3].A.c[0] * d.S2;
  d.Q0 = ch.levels[0].Q.c[0];
  d.Q1 = d.S0 * ch.levels[1].Q.c[0] * d.S0;
  d.Q2 = d.S1 * ch.levels[2].Q.c[0] * d.S1;
  for (int l = 0; l <= 2; ++l)
    for (int m = 0; m <= l; ++m) d.Cprime[l][m] = commutator_jet(ch, l, m).c[1];

  if (d.S2.norm() > 0.5) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (d.S2 + d.S2.adjoint()));
    const CMat W = es.eigenvectors().rightCols((es.eigenvalues().array() > 0.5).count());
    d.I3_rcond = rcond(W.adjoint() * d.I3_0 * W);
    d.I3_invertible = d.I3_rcond >= kSingularRcond;
  }
  return d;
}

EigenvalueExpansionData eigenvalue_expansion(double lambda, const FiberModel& model, double tol) {
  if (model.is_threshold(lambda)) throw WrongEntryPoint("eigenvalue_expansion called at a threshold");
  EigenvalueExpansionData d;
  d.lambda = lambda;
  d.T0 = model.U + boundary_sandwich(lambda, model);
  d.S = numerical_kernel_projection(d.T0, tol);
  d.regular = d.S.norm() < 0.5;
  d.J0S_inv = (d.T0 + d.S).partialPivLu().inverse();
  d.T1_0 = t1_matrix(lambda, 0.0, model);
  d.J1_0 = d.S * d.T1_0 * d.S;
  return d;
}

CMat t1_matrix(double lambda, cplx kappa, const FiberModel& model) {
  const int N = model.N();
  CMat T1 = CMat::Zero(N, N);
  const cplx k2 = kappa * kappa;
  for (int c = 0; c < N; ++c) {
    const double w = lambda - model.eig.lambda[c];
    const double Y = w * w - 4.0;
    const cplx m0 = boundary_momentum(lambda, model.eig.lambda[c]);
    const cplx tau = (2.0 * w - k2) / Y;
    const cplx t = k2 * tau;
    if (std::abs(t) >= 0.9) throw RadiusExceeded("kappa too large for the eigenvalue expansion");
    T1 += m0 * tau * inverse_sqrt_increment(t) * model.vPv[c];
  }
  return T1;
}

namespace {

// Pi (I_l(kappa) + 1 - Pi)^{-1} Pi, unrolled through the chain.
CMat chain_inverse(const ThresholdChain& ch, int l) {
  const auto& lev = ch.levels[l];
  if (l == 3) return lev.Pi * lev.A.value().partialPivLu().inverse() * lev.Pi;
  const CMat Q = lev.Q.value();
  if (lev.S.norm() < 0.5) return lev.Pi * Q * lev.Pi;
  const CMat inner = chain_inverse(ch, l + 1);
  return lev.Pi * (Q + Q * lev.S * inner * lev.S * Q / ch.kappa) * lev.Pi;
}

}  // namespace

CMat m_extended(double lambda, cplx kappa, const FiberModel& model, double eps0) {
  if (kappa.real() < -1e-15 || kappa.imag() > 1e-15)
    throw PreconditionFailed("kappa must satisfy Re kappa >= 0 and Im kappa <= 0");
  if (std::abs(kappa) > eps0) throw RadiusExceeded("|kappa| exceeds the expansion radius");

  if (model.is_threshold(lambda)) {
    const ThresholdExpansionData d = threshold_expansion(lambda, model);
    if (kappa == cplx(0.0)) {
      if (d.S1.norm() > 0.5) {
        std::ostringstream os;
        os << "M(lambda, kappa) has a pole at kappa = 0 (rank S1 = " << std::lround(d.S1.trace().real()) << ")";
        throw SingularMatrix(os.str());
      }
      return d.Q1;
    }
    const auto proj = d.projections();
    const ThresholdChain ch = threshold_chain(lambda, kappa, model, &proj);
    return kappa * chain_inverse(ch, 0);
  }

  const EigenvalueExpansionData d = eigenvalue_expansion(lambda, model);
  if (kappa == cplx(0.0)) {
    if (!d.regular) throw SingularMatrix("lambda is an eigenvalue; M(lambda, kappa) has a pole at kappa = 0");
    if (rcond(d.T0) < kSingularRcond) throw SingularMatrix("T0 is singular");
    return d.T0.partialPivLu().inverse();
  }
  const CMat T1 = t1_matrix(lambda, kappa, model);
  const cplx k2 = kappa * kappa;
  if (d.regular) return (d.T0 + k2 * T1).partialPivLu().inverse();
  const CMat J0S_inv = (d.T0 + k2 * T1 + d.S).partialPivLu().inverse();
  const CMat X = T1 * d.J0S_inv;
  const Eigen::Index N = model.N();
  const CMat J1 = d.S * X * (CMat::Identity(N, N) + k2 * X).partialPivLu().inverse() * d.S;
  const CMat J1inv = inverse_on_range(J1, d.S);
  return J0S_inv + J0S_inv * d.S * J1inv * d.S * J0S_inv / k2;
}

namespace {

bool has(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

std::vector<std::vector<CMat>> threshold_blocks(double lambda, cplx kappa, const std::vector<int>& channels,
                                                const FiberModel& model) {
  const ThresholdExpansionData d = threshold_expansion(lambda, model);
  const auto proj = d.projections();
  const ThresholdChain ch = threshold_chain(lambda, kappa, model, &proj);
  const Eigen::Index N = model.N();
  const CMat& S0 = d.S0;
  const CMat& S1 = d.S1;
  const CMat& S2 = d.S2;
  const CMat* S[3] = {&S0, &S1, &S2};
  CMat Q[3];
  for (int m = 0; m < 3; ++m) Q[m] = ch.levels[m].Pi * ch.levels[m].Q.value() * ch.levels[m].Pi;
  CMat C[3][3];
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m <= l; ++m) {
      KappaJet cj = commutator_jet(ch, l, m);
      cj.c[0].setZero();
      C[l][m] = cj.value();
    }
  CMat I3inv = CMat::Zero(N, N);
  if (S2.norm() > 0.5) I3inv = chain_inverse(ch, 3);

  const auto open = model.open_channels(lambda);
  // first level l at which P_j vhalf S_l vanishes
  auto first_zero = [&](int c) { return has(d.edge_channels, c) ? 0 : has(open, c) ? 1 : 3; };

  const std::size_t n = channels.size();
  std::vector<CMat> Lx[3], Ry[3];  // row brackets X (...) S_l and column brackets S_l (...) Y
  for (std::size_t a = 0; a < n; ++a) {
    const int c = channels[a];
    const int z = first_zero(c);
    const CMat X = model.eig.P[c] * model.Vh;
    const CMat Y = model.Vh * model.eig.P[c];
    CMat xa[3], yc[3];
    for (int l = 0; l < 3; ++l) {
      xa[l] = (l >= z ? CMat(CMat::Zero(N, N)) : CMat(X * *S[l] * Q[0])) - X * C[l][0];
      yc[l] = (l >= z ? CMat(CMat::Zero(N, N)) : CMat(Q[0] * *S[l] * Y)) + C[l][0] * Y;
    }
    const CMat b1 = xa[1] * Q[1] - xa[0] * C[1][1];
    const CMat d1 = Q[1] * yc[1] + C[1][1] * yc[0];
    Lx[0].push_back(xa[0] * S0);
    Lx[1].push_back(b1 * S1);
    Lx[2].push_back(((xa[2] * Q[1] - xa[0] * C[2][1]) * Q[2] - b1 * C[2][2]) * S2);
    Ry[0].push_back(S0 * yc[0]);
    Ry[1].push_back(S1 * d1);
    Ry[2].push_back(S2 * (Q[2] * (Q[1] * yc[2] + C[2][1] * yc[0]) + C[2][2] * d1));
  }
  std::vector<std::vector<CMat>> out(n, std::vector<CMat>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const CMat X = model.eig.P[channels[a]] * model.Vh;
      const CMat Y = model.Vh * model.eig.P[channels[b]];
      CMat B = kappa * (X * Q[0] * Y) + Lx[0][a] * Q[1] * Ry[0][b];
      if (S1.norm() > 0.5) B += Lx[1][a] * Q[2] * Ry[1][b] / kappa;
      if (S2.norm() > 0.5) B += Lx[2][a] * I3inv * Ry[2][b] / (kappa * kappa);
      out[a][b] = B;
    }
  return out;
}

std::vector<std::vector<CMat>> eigenvalue_blocks(double lambda, cplx kappa, const std::vector<int>& channels,
                                                 const FiberModel& model) {
  const EigenvalueExpansionData d = eigenvalue_expansion(lambda, model);
  const std::size_t n = channels.size();
  std::vector<std::vector<CMat>> out(n, std::vector<CMat>(n));
  if (d.regular) {
    const CMat M = m_extended(lambda, kappa, model);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        out[a][b] = model.eig.P[channels[a]] * model.Vh * M * model.Vh * model.eig.P[channels[b]];
    return out;
  }
  if (kappa == cplx(0.0)) throw SingularMatrix("lambda is an eigenvalue; M(lambda, kappa) has a pole at kappa = 0");
  // J = (T0 + kappa^2 T1 + S)^{-1}, J0 = J at kappa = 0. With [J0, S] = 0 and P_j vhalf S = 0 for open j,
  // X J S = -kappa^2 X J0 T1 J S, so the kappa^{-2} term keeps a kappa^2 in front.
  const cplx k2 = kappa * kappa;
  const Eigen::Index N = model.N();
  const CMat T1 = t1_matrix(lambda, kappa, model);
  const CMat J = (d.T0 + k2 * T1 + d.S).partialPivLu().inverse();
  const CMat& J0 = d.J0S_inv;
  const CMat X1 = T1 * J;
  const CMat J1 = d.S * X1 * (CMat::Identity(N, N) + k2 * X1).partialPivLu().inverse() * d.S;
  const CMat J1inv = inverse_on_range(J1, d.S);
  const auto open = model.open_channels(lambda);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const CMat X = model.eig.P[channels[a]] * model.Vh;
      const CMat Y = model.Vh * model.eig.P[channels[b]];
      const CMat left = has(open, channels[a]) ? CMat(-k2 * X * J0 * T1 * J * d.S) : CMat(X * J * d.S);
      const CMat right = has(open, channels[b]) ? CMat(-k2 * d.S * J * T1 * J0 * Y) : CMat(d.S * J * Y);
      out[a][b] = X * J * Y + left * J1inv * right / k2;
    }
  return out;
}

}  // namespace

std::vector<std::vector<CMat>> m_channel_blocks(double lambda, cplx kappa, const std::vector<int>& channels,
                                                const FiberModel& model, double eps0) {
  if (kappa.real() < -1e-15 || kappa.imag() > 1e-15)
    throw PreconditionFailed("kappa must satisfy Re kappa >= 0 and Im kappa <= 0");
  if (std::abs(kappa) > eps0) throw RadiusExceeded("|kappa| exceeds the expansion radius");
  if (model.is_threshold(lambda)) {
    if (kappa == cplx(0.0)) {
      const CMat M = m_extended(lambda, kappa, model, eps0);
      std::vector<std::vector<CMat>> out(channels.size(), std::vector<CMat>(channels.size()));
      for (std::size_t a = 0; a < channels.size(); ++a)
        for (std::size_t b = 0; b < channels.size(); ++b)
          out[a][b] = model.eig.P[channels[a]] * model.Vh * M * model.Vh * model.eig.P[channels[b]];
      return out;
    }
    return threshold_blocks(lambda, kappa, channels, model);
  }
  return eigenvalue_blocks(lambda, kappa, channels, model);
}

}  // namespace halfspace
