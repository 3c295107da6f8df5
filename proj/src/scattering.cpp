#include "halfspace/scattering.hpp"

#include "halfspace/linalg.hpp"
#include "halfspace/resolvent.hpp"
#include "halfspace/threshold_expansions.hpp"

#include <algorithm>
#include <cmath>

namespace halfspace {

namespace {

CMat assemble(const std::vector<int>& open, const FiberModel& model, const std::vector<std::vector<CMat>>& blocks) {
  const int d = static_cast<int>(open.size());
  CMat A(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) A(a, b) = model.eig.xi[open[a]].dot(blocks[a][b] * model.eig.xi[open[b]]);
  return A;
}

// delta_{jj'} P_j - f P_j vhalf X vhalf P_j'
CMat sandwich_block(int j, int jp, cplx f, const CMat& X, const FiberModel& model) {
  CMat B = -f * (model.eig.P[j] * model.Vh * X * model.Vh * model.eig.P[jp]);
  if (j == jp) B += model.eig.P[j];
  return B;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

OnShellSMatrix smatrix_from_m(double lambda, const CMat& M, const FiberModel& model) {
  OnShellSMatrix s;
  s.lambda = lambda;
  s.open_channels = model.open_channels(lambda);
  const auto& open = s.open_channels;
  s.blocks.assign(open.size(), std::vector<CMat>(open.size()));
  for (std::size_t a = 0; a < open.size(); ++a)
    for (std::size_t b = 0; b < open.size(); ++b) {
      const double ba = beta_factor(lambda, open[a], model.eig), bb = beta_factor(lambda, open[b], model.eig);
      s.blocks[a][b] = sandwich_block(open[a], open[b], 2.0 * kI / (ba * bb), M, model);
    }
  s.assembled = assemble(open, model, s.blocks);
  return s;
}

OnShellSMatrix onshell_smatrix(double lambda, const FiberModel& model) {
  if (model.is_threshold(lambda)) throw ThresholdPoint("lambda is a threshold; use threshold_limit");
  if (model.open_channels(lambda).empty()) throw WrongEntryPoint("lambda lies outside the spectrum of H0");
  MMatrix M;
  try {
    M = m_matrix_boundary(lambda, model);
  } catch (const SingularMatrix&) {
    throw SingularMatrix("lambda is an eigenvalue of H; use embedded_limit");
  }
  return smatrix_from_m(lambda, M.value, model);
}

OnShellSMatrix smatrix_expansion(double lambda, cplx kappa, const FiberModel& model) {
  const cplx zc = lambda - kappa * kappa;
  if (std::abs(zc.imag()) > 1e-14 * std::max(1.0, std::abs(zc)))
    throw PreconditionFailed("kappa must be real or purely imaginary");
  const double z = zc.real();
  OnShellSMatrix s;
  s.lambda = z;
  s.open_channels = model.open_channels(z);
  const auto& open = s.open_channels;
  const auto XMY = m_channel_blocks(lambda, kappa, open, model);
  s.blocks.assign(open.size(), std::vector<CMat>(open.size()));
  for (std::size_t a = 0; a < open.size(); ++a)
    for (std::size_t b = 0; b < open.size(); ++b) {
      const double ba = beta_factor(z, open[a], model.eig), bb = beta_factor(z, open[b], model.eig);
      CMat B = (-2.0 * kI / (ba * bb)) * XMY[a][b];
      if (a == b) B += model.eig.P[open[a]];
      s.blocks[a][b] = B;
    }
  s.assembled = assemble(open, model, s.blocks);
  return s;
}

double unitarity_defect(const CMat& S) {
  if (S.size() == 0) return 0.0;
  return (S * S.adjoint() - CMat::Identity(S.rows(), S.rows())).cwiseAbs().maxCoeff();
}

std::string side_name(ApproachSide s) { return s == ApproachSide::from_right ? "from-right" : "from-left"; }

std::string pair_class_name(PairClass c) {
  switch (c) {
    case PairClass::already_open:
      return "already-open";
    case PairClass::opening:
      return "opening";
    case PairClass::closing:
      return "closing";
    case PairClass::undefined:
      return "undefined";
  }
  return "?";
}

ThresholdLimitReport threshold_limit(double lambda, const FiberModel& model) {
  const ThresholdExpansionData d = threshold_expansion(lambda, model);
  ThresholdLimitReport rep;
  rep.lambda = lambda;
  rep.left_edge = d.left_edge;
  rep.right_edge = d.right_edge;
  const int N = model.N();
  const auto interior = model.open_channels(lambda);

  // open-channel terms of the already-open limit and the edge-edge correction
  const CMat C10 = d.Cprime[1][0];
  const CMat edge_pair = d.Q0 - C10 * d.Q2 * C10;

  for (ApproachSide side : {ApproachSide::from_right, ApproachSide::from_left}) {
    SideLimit& sl = side == ApproachSide::from_right ? rep.from_right : rep.from_left;
    sl.side = side;
    sl.n = N;
    // a left edge (lambda = lambda_c - 2) opens to the right, a right edge to the left
    const auto& opening = side == ApproachSide::from_right ? d.left_edge : d.right_edge;
    const cplx f = side == ApproachSide::from_right ? cplx(1.0) : kI;
    for (int c = 0; c < N; ++c)
      if (contains(interior, c) || contains(opening, c)) sl.open_channels.push_back(c);
    for (int j = 0; j < N; ++j)
      for (int jp = 0; jp < N; ++jp) {
        PairLimit p;
        p.j = j;
        p.jp = jp;
        const bool oj = contains(interior, j), ojp = contains(interior, jp);
        const bool ej = contains(opening, j), ejp = contains(opening, jp);
        if (oj && ojp) {
          p.cls = PairClass::already_open;
          const double bj = beta_factor(lambda, j, model.eig), bjp = beta_factor(lambda, jp, model.eig);
          p.block = sandwich_block(j, jp, 2.0 * kI / (bj * bjp), d.Q1, model);
        } else if ((oj || ej) && (ojp || ejp)) {
          p.cls = side == ApproachSide::from_right ? PairClass::opening : PairClass::closing;
          if (ej && ejp)
            p.block = sandwich_block(j, jp, f, edge_pair, model);
          else
            p.block = CMat::Zero(N, N);
        }
        if (p.cls != PairClass::undefined) p.value = model.eig.xi[j].dot(p.block * model.eig.xi[jp]);
        sl.pairs.push_back(std::move(p));
      }
    const int dsz = static_cast<int>(sl.open_channels.size());
    sl.assembled = CMat(dsz, dsz);
    for (int a = 0; a < dsz; ++a)
      for (int b = 0; b < dsz; ++b) sl.assembled(a, b) = sl.pair(sl.open_channels[a], sl.open_channels[b]).value;
  }
  return rep;
}

EmbeddedLimit embedded_limit(double lambda, const FiberModel& model) {
  if (model.is_threshold(lambda)) throw WrongEntryPoint("lambda is a threshold; use threshold_limit");
  EmbeddedLimit e;
  e.lambda = lambda;
  e.open_channels = model.open_channels(lambda);
  if (e.open_channels.empty()) throw WrongEntryPoint("lambda is not inside a band");
  const EigenvalueExpansionData d = eigenvalue_expansion(lambda, model);
  if (d.regular) throw WrongEntryPoint("lambda is not an eigenvalue; use onshell_smatrix");
  const auto& open = e.open_channels;
  e.blocks.assign(open.size(), std::vector<CMat>(open.size()));
  for (std::size_t a = 0; a < open.size(); ++a)
    for (std::size_t b = 0; b < open.size(); ++b) {
      const double ba = beta_factor(lambda, open[a], model.eig), bb = beta_factor(lambda, open[b], model.eig);
      e.blocks[a][b] = sandwich_block(open[a], open[b], 2.0 * kI / (ba * bb), d.J0S_inv, model);
    }
  e.assembled = assemble(open, model, e.blocks);
  return e;
}

namespace {

std::optional<double> observed_order(const std::vector<ProbeRow>& rows, ApproachSide side, bool already_open) {
  std::vector<const ProbeRow*> r;
  for (const auto& row : rows)
    if (row.side == side) r.push_back(&row);
  if (r.size() < 2) return std::nullopt;
  const auto& a = *r[r.size() - 2];
  const auto& b = *r[r.size() - 1];
  const double ea = already_open ? a.error_already_open : a.error;
  const double eb = already_open ? b.error_already_open : b.error;
  if (ea <= 0.0 || eb <= 0.0) return std::nullopt;
  return std::log(ea / eb) / std::log(a.t / b.t);
}

}  // namespace

ContinuityProbe continuity_probe(double lambda, const FiberModel& model, const std::vector<double>& schedule) {
  ContinuityProbe pr;
  pr.lambda = lambda;
  pr.threshold = model.is_threshold(lambda);
  std::optional<ThresholdLimitReport> rep;
  std::optional<EmbeddedLimit> emb;
  if (pr.threshold)
    rep = threshold_limit(lambda, model);
  else
    emb = embedded_limit(lambda, model);

  for (ApproachSide side : {ApproachSide::from_right, ApproachSide::from_left}) {
    if (rep && rep->side(side).open_channels.empty()) continue;  // spectrum edge: nothing on this side
    for (double t : schedule) {
      const double z = side == ApproachSide::from_right ? lambda + t * t : lambda - t * t;
      ProbeRow row;
      row.t = t;
      row.side = side;
      // Close to a threshold resonance the direct inverse loses rcond below the singular cutoff;
      // the expansion evaluates the same M there without the cancellation.
      OnShellSMatrix S;
      try {
        S = onshell_smatrix(z, model);
      } catch (const SingularMatrix&) {
        if (t > 1e-2) throw;
        const cplx kappa = side == ApproachSide::from_right ? cplx(0.0, -t) : cplx(t, 0.0);
        S = smatrix_expansion(lambda, kappa, model);
      }
      const auto& open = S.open_channels;
      for (std::size_t a = 0; a < open.size(); ++a)
        for (std::size_t b = 0; b < open.size(); ++b) {
          const cplx num = S.assembled(a, b);
          cplx lim;
          bool both_sides = true;
          if (rep) {
            const auto& p = rep->side(side).pair(open[a], open[b]);
            if (p.cls == PairClass::undefined) continue;
            lim = p.value;
            both_sides = p.cls == PairClass::already_open;
          } else {
            const auto& eo = emb->open_channels;
            const auto ia = std::find(eo.begin(), eo.end(), open[a]) - eo.begin();
            const auto ib = std::find(eo.begin(), eo.end(), open[b]) - eo.begin();
            lim = emb->assembled(ia, ib);
          }
          const double err = std::abs(num - lim);
          row.error = std::max(row.error, err);
          if (both_sides) row.error_already_open = std::max(row.error_already_open, err);
        }
      pr.rows.push_back(row);
    }
  }
  pr.order_from_right = observed_order(pr.rows, ApproachSide::from_right, false);
  pr.order_from_left = observed_order(pr.rows, ApproachSide::from_left, false);
  const auto o1 = observed_order(pr.rows, ApproachSide::from_right, true);
  const auto o2 = observed_order(pr.rows, ApproachSide::from_left, true);
  if (o1 && o2)
    pr.order_already_open = std::min(*o1, *o2);
  else
    pr.order_already_open = o1 ? o1 : o2;
  return pr;
}

std::vector<OnShellSMatrix> smatrix_scan(int band, int points, const FiberModel& model,
                                         const std::vector<double>& eigenvalues, double exclusion) {
  if (band < 0 || band >= model.N()) throw InvalidRun("band index out of range");
  if (points < 1) throw InvalidRun("scan needs at least one point");
  std::vector<OnShellSMatrix> out;
  const double lo = model.eig.lambda[band] - 2.0;
  for (int k = 0; k < points; ++k) {
    const double lam = lo + 4.0 * (k + 0.5) / points;
    bool skip = false;
    for (double t : model.bands.thresholds) skip = skip || std::abs(lam - t) < exclusion;
    for (double e : eigenvalues) skip = skip || std::abs(lam - e) < exclusion;
    if (skip) continue;
    out.push_back(onshell_smatrix(lam, model));
  }
  return out;
}

}  // namespace halfspace
