#include "halfspace/timedomain.hpp"

#include "halfspace/lattice.hpp"

#include <cmath>
#include <sstream>

namespace halfspace {

namespace {

// sum_w g(w) u_w(n) dw / pi with u_w(0) = 1, u_w(n) = 2^{1/2} cos(n w), on a uniform midpoint grid.
CVec cosine_packet(const std::vector<double>& w, const std::vector<double>& g, double dw, int L) {
  CVec out = CVec::Zero(L + 1);
  for (std::size_t q = 0; q < w.size(); ++q) {
    if (g[q] == 0.0) continue;
    const double a = g[q] * dw / kPi;
    out[0] += a;
    for (int n = 1; n <= L; ++n) out[n] += a * std::sqrt(2.0) * std::cos(n * w[q]);
  }
  return out;
}

CVec embed(const CVec& profile, const CVec& xi) {
  const Eigen::Index N = xi.size();
  CVec out(N * profile.size());
  for (Eigen::Index n = 0; n < profile.size(); ++n) out.segment(n * N, N) = profile[n] * xi;
  return out;
}

}  // namespace

TimeDomainSMatrix timedomain_smatrix_probe(const FiberModel& model, double lambda, const TimeDomainConfig& cfg) {
  if (cfg.L < 2000) throw InvalidRun("time-domain probe needs L >= 2000");
  if (!(cfg.T > 0.0) || cfg.T > 0.4 * cfg.L) throw InvalidRun("time-domain probe needs 0 < T <= 0.4 L");
  const auto& eig = model.eig;
  const int N = model.N();
  for (double t : model.bands.thresholds)
    if (std::abs(lambda - t) < 0.2) throw PreconditionFailed("probe energy within 0.2 of a threshold");

  TimeDomainSMatrix out;
  out.lambda = lambda;
  for (int c = 0; c < N; ++c)
    if (eig.in_band(lambda, c)) out.open_channels.push_back(c);
  if (out.open_channels.empty()) throw PreconditionFailed("probe energy outside the spectrum");

  const int nq = 8192;
  const double dw = kPi / nq;
  std::vector<double> w(nq);
  for (int q = 0; q < nq; ++q) w[q] = (q + 0.5) * dw;
  auto F = [&](double mu) { return std::exp(-0.5 * std::pow((mu - lambda) / cfg.width, 2)); };

  double fnorm = 0.0;  // int |F|^2 dmu / pi, the common norm of every packet
  std::vector<CVec> phi;
  for (int c : out.open_channels) {
    std::vector<double> g(nq);
    for (int q = 0; q < nq; ++q) {
      const double mu = eig.lambda[c] + 2.0 * std::cos(w[q]);
      const double f = F(mu);
      g[q] = f < 1e-16 ? 0.0 : f * std::sqrt(2.0 * std::sin(w[q]));
    }
    if (fnorm == 0.0)
      for (int q = 0; q < nq; ++q) fnorm += g[q] * g[q] * dw / kPi;
    phi.push_back(embed(cosine_packet(w, g, dw, cfg.L), eig.xi[c]));
  }

  const TruncatedFiber H0(model, cfg.L, false), H(model, cfg.L, true);
  const int d = static_cast<int>(phi.size());
  std::vector<CVec> in(d), back(d);
  for (int a = 0; a < d; ++a) {
    in[a] = phi[a];
    chebyshev_propagate(H0, in[a], -cfg.T, cfg.tol);  // e^{iTH0} phi
    back[a] = phi[a];
    chebyshev_propagate(H0, back[a], cfg.T, cfg.tol);  // e^{-iTH0} phi
  }
  out.blocks.resize(d, d);
  const Eigen::Index wall = static_cast<Eigen::Index>(0.95 * cfg.L) * N;
  for (int b = 0; b < d; ++b) {
    CVec psi = in[b];
    out.edge_mass = std::max(out.edge_mass, psi.tail(psi.size() - wall).norm() / psi.norm());
    chebyshev_propagate(H, psi, 2.0 * cfg.T, cfg.tol);
    out.edge_mass = std::max(out.edge_mass, psi.tail(psi.size() - wall).norm() / psi.norm());
    for (int a = 0; a < d; ++a) out.blocks(a, b) = back[a].dot(psi) / fnorm;
  }
  if (out.edge_mass > 1e-6) {
    std::ostringstream os;
    os << "packet reached the truncation wall (relative weight " << out.edge_mass << "); increase L or reduce T";
    throw InvalidRun(os.str());
  }
  out.column_norms = out.blocks.cwiseAbs2().colwise().sum().transpose();
  return out;
}

}  // namespace halfspace
