#pragma once

#include "halfspace/fiber_model.hpp"

#include <vector>

namespace halfspace {

struct TimeDomainConfig {
  int L = 2000;
  double T = 400.0;
  double width = 0.03;  // energy width of the packets
  double tol = 1e-8;    // Chebyshev tolerance
};

struct TimeDomainSMatrix {
  double lambda = 0.0;
  std::vector<int> open_channels;
  CMat blocks;               // <phi_j, e^{iTH0} e^{-2iTH} e^{iTH0} phi_j'> / ||F||^2, open channels
  RVec column_norms;         // sum_j |S_jj'|^2 per incoming channel
  double edge_mass = 0.0;    // largest weight left within 5% of the wall after propagation
};

// Packet estimate of the open-channel S matrix at lambda. Each channel carries the same energy
// profile F(mu) = exp(-(mu - lambda)^2 / (2 width^2)) through the cosine basis of the half line;
// S phi ~ e^{iTH0} e^{-2iTH} e^{iTH0} phi for large T.
TimeDomainSMatrix timedomain_smatrix_probe(const FiberModel& model, double lambda,
                                           const TimeDomainConfig& cfg = {});

}  // namespace halfspace
