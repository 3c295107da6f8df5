#pragma once

#include "halfspace/fiber_model.hpp"
#include "halfspace/kappa_jet.hpp"

#include <functional>
#include <vector>

namespace halfspace {

// One step of the inversion formula for A(z) = A0 + z A1(z) with projection S.
struct JnStep {
  CMat B;       // (1/z)(S - S (A(z) + S)^{-1} S), supported on S
  CMat A_inv;   // empty when B is singular on the range of S
  bool singular = false;
  double series_ratio = 0.0;  // |z| ||A1(z) (A0 + S)^{-1}||
};
JnStep jn_inverse_step(const CMat& A0, const std::function<CMat(cplx)>& A1, const CMat& S, cplx z);

// Level l of the iterated chain. A = I_l(kappa) + 1 - Pi on C^N with Pi = S_{l-1} (Pi = 1 at
// level 0), S = S_l, Q = (A + S)^{-1} so that (I_l + S_l)^{-1} on Pi C^N is Q Pi.
struct ChainLevel {
  CMat Pi;
  CMat S;
  KappaJet A;
  KappaJet Q;
};

struct ThresholdChain {
  double lambda = 0.0;
  cplx kappa;
  std::vector<int> left_edge;   // lambda = lambda_c - 2
  std::vector<int> right_edge;  // lambda = lambda_c + 2
  std::vector<ChainLevel> levels;  // I_0 .. I_3
};

// I_0(kappa) as an order-4 jet (requires lambda to be a threshold).
KappaJet i0_jet(double lambda, cplx kappa, const FiberModel& model);

// Builds the chain at kappa. Projections are taken from the kappa = 0 coefficients unless
// supplied (then they are reused verbatim so values at different kappa share them).
ThresholdChain threshold_chain(double lambda, cplx kappa, const FiberModel& model,
                               const std::vector<CMat>* projections = nullptr);

// C_{lm}(kappa) = [S_l, (I_m(kappa) + S_m)^{-1}] as a jet, 2 >= l >= m >= 0.
KappaJet commutator_jet(const ThresholdChain& ch, int l, int m);

struct ThresholdExpansionData {
  double lambda = 0.0;
  std::vector<int> edge_channels;
  std::vector<int> left_edge;
  std::vector<int> right_edge;
  CMat I0_0, M1_0, I1_0, I2_0, I3_0;
  CMat S0, S1, S2;
  CMat Q0, Q1, Q2;  // (I_l(0) + S_l)^{-1} restricted to the previous range (Q0 on C^N)
  CMat Cprime[3][3];  // C'_{lm}(0), l >= m
  bool I3_invertible = true;
  double I3_rcond = 1.0;
  std::vector<CMat> projections() const { return {S0, S1, S2}; }
};

ThresholdExpansionData threshold_expansion(double lambda, const FiberModel& model);

struct EigenvalueExpansionData {
  double lambda = 0.0;
  CMat T0;
  CMat S;
  CMat J0S_inv;  // (J_0(0) + S)^{-1} = (T0 + S)^{-1}
  CMat T1_0;
  CMat J1_0;  // S T1(0) S
  bool regular = false;
};

EigenvalueExpansionData eigenvalue_expansion(double lambda, const FiberModel& model, double tol = 1e-8);

// T1(kappa) = (J0(kappa) - T0) / kappa^2, exact.
CMat t1_matrix(double lambda, cplx kappa, const FiberModel& model);

// M(lambda, kappa) for kappa in the closed quarter disc Re >= 0, Im <= 0, |kappa| <= eps0.
CMat m_extended(double lambda, cplx kappa, const FiberModel& model, double eps0 = 1e-2);

// Blocks P_j vhalf M(lambda, kappa) vhalf P_j' for all pairs of `channels`, blocks[a][b].
// The chain is rearranged so every projection S_l sits next to a P_j vhalf factor, and the
// products P_j vhalf S_l that vanish identically (edge channels for l >= 0, open channels for
// l >= 1, open channels against S at an eigenvalue) are dropped instead of being left to
// rounding. Commutators enter through their jets with the vanishing constant term removed.
// Near a pole of M this keeps the channel blocks accurate where kappa * m_extended is not.
std::vector<std::vector<CMat>> m_channel_blocks(double lambda, cplx kappa, const std::vector<int>& channels,
                                                const FiberModel& model, double eps0 = 1e-2);

}  // namespace halfspace
