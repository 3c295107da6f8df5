#pragma once

#include "halfspace/fiber_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace halfspace {

// Blocks are N x N matrices supported on P_j (left) and P_j' (right); `assembled` holds the
// scalars xi_j* block xi_j' in the open-channel basis, index order.
struct OnShellSMatrix {
  double lambda = 0.0;
  std::vector<int> open_channels;
  std::vector<std::vector<CMat>> blocks;
  CMat assembled;
};

// S blocks from a given M at a real energy (no threshold or eigenvalue check).
OnShellSMatrix smatrix_from_m(double lambda, const CMat& M, const FiberModel& model);

OnShellSMatrix onshell_smatrix(double lambda, const FiberModel& model);

// S(lambda - kappa^2) for kappa on one of the two axes of the quarter disc (a real energy next to
// a threshold or an eigenvalue), assembled from the expansion blocks of m_channel_blocks.
OnShellSMatrix smatrix_expansion(double lambda, cplx kappa, const FiberModel& model);

double unitarity_defect(const CMat& S);

// z = lambda + t^2 (kappa = -i t) or z = lambda - t^2 (kappa = t), t > 0.
enum class ApproachSide { from_right, from_left };
std::string side_name(ApproachSide s);

enum class PairClass { already_open, opening, closing, undefined };
std::string pair_class_name(PairClass c);

struct PairLimit {
  int j = 0;
  int jp = 0;
  PairClass cls = PairClass::undefined;
  CMat block;  // empty when undefined
  cplx value;  // xi_j* block xi_j'
};

struct SideLimit {
  ApproachSide side = ApproachSide::from_right;
  std::vector<int> open_channels;  // channels open on this side of lambda
  std::vector<PairLimit> pairs;    // all N^2 pairs, row-major in (j, jp)
  CMat assembled;                  // limit on the open channels of this side
  const PairLimit& pair(int j, int jp) const { return pairs[static_cast<std::size_t>(j) * n + jp]; }
  int n = 0;
};

struct ThresholdLimitReport {
  double lambda = 0.0;
  std::vector<int> left_edge;
  std::vector<int> right_edge;
  SideLimit from_right;
  SideLimit from_left;
  const SideLimit& side(ApproachSide s) const { return s == ApproachSide::from_right ? from_right : from_left; }
};

ThresholdLimitReport threshold_limit(double lambda, const FiberModel& model);

struct EmbeddedLimit {
  double lambda = 0.0;
  std::vector<int> open_channels;
  std::vector<std::vector<CMat>> blocks;
  CMat assembled;
};

EmbeddedLimit embedded_limit(double lambda, const FiberModel& model);

struct ProbeRow {
  double t = 0.0;  // |kappa|; the energy offset is t^2
  ApproachSide side = ApproachSide::from_right;
  double error = 0.0;              // max over pairs defined on this side
  double error_already_open = 0.0;  // max over pairs open on both sides
};

struct ContinuityProbe {
  double lambda = 0.0;
  bool threshold = false;
  std::vector<ProbeRow> rows;
  // Observed orders in t from the last two schedule points; nullopt with fewer than two.
  std::optional<double> order_from_right, order_from_left, order_already_open;
};

ContinuityProbe continuity_probe(double lambda, const FiberModel& model, const std::vector<double>& schedule);

// S on n points spread over band j (0-based), skipping points within `exclusion` of a
// threshold or of one of the supplied eigenvalues.
std::vector<OnShellSMatrix> smatrix_scan(int band, int points, const FiberModel& model,
                                         const std::vector<double>& eigenvalues = {}, double exclusion = 1e-6);

}  // namespace halfspace
