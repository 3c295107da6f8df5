#include "halfspace/spectral_points.hpp"

#include "halfspace/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace halfspace {

CMat criterion_matrix(double lambda, const FiberModel& model) {
  if (model.is_threshold(lambda)) throw ThresholdPoint("criterion matrix requested at a threshold");
  CMat T = model.U;
  for (int c = 0; c < model.N(); ++c) {
    const double w = lambda - model.eig.lambda[c];
    const double b2 = std::sqrt(std::abs(w * w - 4.0));
    if (w < -2.0)
      T += model.vPv[c] / b2;
    else if (w > 2.0)
      T -= model.vPv[c] / b2;
  }
  return T;
}

CMat stacked_criterion(double lambda, const FiberModel& model) {
  const CMat T = criterion_matrix(lambda, model);
  const auto open = model.open_channels(lambda);
  const int N = model.N();
  CMat S(N + static_cast<int>(open.size()), N);
  S.topRows(N) = T;
  for (std::size_t k = 0; k < open.size(); ++k) S.row(N + static_cast<int>(k)) = model.eig.xi[open[k]].adjoint() * model.Vh;
  return S;
}

KernelTestResult eigenvalue_test(double lambda, const FiberModel& model, double tol) {
  KernelTestResult r;
  r.lambda = lambda;
  r.matrix = criterion_matrix(lambda, model);
  r.open_channels = model.open_channels(lambda);
  const CMat S = stacked_criterion(lambda, model);
  r.kernel_basis = numerical_kernel_basis(S, tol);
  r.kernel_dim = static_cast<int>(r.kernel_basis.cols());
  const RVec sv = singular_values(S);
  r.sigma_min = sv.size() && sv[0] > 0.0 ? sv[sv.size() - 1] / sv[0] : 0.0;
  return r;
}

std::string location_name(EigenLocation l) {
  switch (l) {
    case EigenLocation::below:
      return "below";
    case EigenLocation::above:
      return "above";
    case EigenLocation::gap:
      return "gap";
    case EigenLocation::embedded:
      return "embedded";
  }
  return "?";
}

int criterion_negative_count(double lambda, const FiberModel& model) {
  Eigen::SelfAdjointEigenSolver<CMat> es(criterion_matrix(lambda, model), Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() < 0.0).count());
}

namespace {

double relative_sigma_min(double lambda, const FiberModel& model) {
  const RVec sv = singular_values(stacked_criterion(lambda, model));
  return sv[0] > 0.0 ? sv[sv.size() - 1] / sv[0] : 0.0;
}

EigenLocation classify(double lambda, const FiberModel& model, bool embedded) {
  if (lambda < model.bands.spectrum_lo) return EigenLocation::below;
  if (lambda > model.bands.spectrum_hi) return EigenLocation::above;
  return embedded ? EigenLocation::embedded : EigenLocation::gap;
}

// Off sigma(H0): bisection on the monotone negative count.
void count_search(const FiberModel& model, SearchInterval& iv, double a, double b, const SearchOptions& opt,
                  std::vector<SpectrumEntry>& out) {
  const int na = criterion_negative_count(a, model);
  const int nb = criterion_negative_count(b, model);
  std::vector<double> roots;
  for (int k = 0; k < na - nb; ++k) {
    double lo = a, hi = b;
    while (hi - lo > opt.tol) {
      const double mid = 0.5 * (lo + hi);
      ++iv.refinements;
      if (criterion_negative_count(mid, model) <= na - k - 1)
        hi = mid;
      else
        lo = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  for (std::size_t k = 0; k < roots.size();) {
    std::size_t e = k + 1;
    while (e < roots.size() && roots[e] - roots[k] <= 10.0 * opt.tol) ++e;
    SpectrumEntry s;
    s.lambda = roots[k];
    s.multiplicity = static_cast<int>(e - k);
    s.location = classify(s.lambda, model, false);
    s.kernel_dim = eigenvalue_test(s.lambda, model, 1e-6).kernel_dim;
    out.push_back(s);
    ++iv.found;
    k = e;
  }
}

double golden_min(const FiberModel& model, double a, double b, int& evals) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = relative_sigma_min(x1, model), f2 = relative_sigma_min(x2, model);
  evals += 2;
  while (b - a > 1e-13) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = relative_sigma_min(x1, model);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = relative_sigma_min(x2, model);
    }
    ++evals;
  }
  return f1 < f2 ? x1 : x2;
}

void embedded_search(const FiberModel& model, SearchInterval& iv, double a, double b, const SearchOptions& opt,
                     std::vector<SpectrumEntry>& out) {
  if (b <= a) return;
  const int n = std::max(3, static_cast<int>(std::ceil((b - a) / opt.grid_step)) + 1);
  std::vector<double> x(n), f(n);
  for (int k = 0; k < n; ++k) {
    x[k] = a + (b - a) * k / (n - 1);
    f[k] = relative_sigma_min(x[k], model);
  }
  double last = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const bool left_ok = k == 0 || f[k] <= f[k - 1];
    const bool right_ok = k == n - 1 || f[k] <= f[k + 1];
    if (!(left_ok && right_ok) || f[k] >= opt.candidate_sigma) continue;
    const double lo = x[std::max(0, k - 1)];
    const double hi = x[std::min(n - 1, k + 1)];
    const double xm = golden_min(model, lo, hi, iv.refinements);
    if (relative_sigma_min(xm, model) >= opt.accept_sigma) continue;
    if (xm - last <= 10.0 * opt.tol) continue;  // same minimum seen from two grid points
    last = xm;
    SpectrumEntry s;
    s.lambda = xm;
    s.kernel_dim = eigenvalue_test(xm, model, 1e-6).kernel_dim;
    s.multiplicity = std::max(1, s.kernel_dim);
    s.location = EigenLocation::embedded;
    out.push_back(s);
    ++iv.found;
  }
}

}  // namespace

PointSpectrum point_spectrum(const FiberModel& model, const SearchOptions& opt) {
  PointSpectrum ps;
  ps.theta = model.theta();
  const double pad = 1.0 + model.max_abs_v();
  std::vector<double> pts{-4.0 - pad};
  for (double t : model.bands.thresholds) pts.push_back(t);
  pts.push_back(4.0 + pad);

  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double lo = pts[k], hi = pts[k + 1];
    if (hi - lo <= 2.0 * opt.exclusion) continue;
    const bool lo_edge = k > 0;
    const bool hi_edge = k + 2 < pts.size();
    SearchInterval iv{lo, hi, !model.open_channels(0.5 * (lo + hi)).empty(), 0, 0};
    if (iv.embedded)
      embedded_search(model, iv, lo + opt.exclusion, hi - opt.exclusion, opt, ps.entries);
    else
      count_search(model, iv, lo + (lo_edge ? opt.edge_offset : 0.0), hi - (hi_edge ? opt.edge_offset : 0.0), opt,
                   ps.entries);
    ps.intervals.push_back(iv);
  }
  std::sort(ps.entries.begin(), ps.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.lambda < b.lambda; });
  return ps;
}

Dispersion surface_dispersion(const std::vector<double>& v, int M, const SearchOptions& opt) {
  if (M < 1) throw InvalidRun("dispersion grid needs at least one point");
  Dispersion d;
  struct Live {
    int id;
    double lambda;
  };
  std::vector<Live> prev;
  for (int k = 0; k < M; ++k) {
    const double th = M == 1 ? 0.0 : 2.0 * kPi * k / (M - 1);
    d.thetas.push_back(th);
    const FiberModel model(make_model(v, th));
    const auto ps = point_spectrum(model, opt);
    const int n = static_cast<int>(ps.entries.size());

    // Greedy nearest-neighbour assignment; a candidate whose two closest previous branches
    // are nearly equidistant is left unmatched and flagged.
    std::vector<int> assigned(n, -1);
    std::vector<bool> used(prev.size(), false);
    std::vector<std::tuple<double, int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (std::size_t p = 0; p < prev.size(); ++p)
        pairs.emplace_back(std::abs(ps.entries[i].lambda - prev[p].lambda), i, static_cast<int>(p));
    std::sort(pairs.begin(), pairs.end());
    for (int i = 0; i < n && prev.size() >= 2; ++i) {
      std::vector<double> dist;
      for (const auto& pv : prev) dist.push_back(std::abs(ps.entries[i].lambda - pv.lambda));
      std::sort(dist.begin(), dist.end());
      if (dist[1] - dist[0] <= 1e-3 * std::max(1.0, dist[1])) {
        assigned[i] = -2;
        d.ambiguous = true;
        std::ostringstream os;
        os << "branch matching ambiguous at theta = " << th << ", lambda = " << ps.entries[i].lambda;
        d.warnings.push_back(os.str());
      }
    }
    for (const auto& [dist, i, p] : pairs) {
      if (assigned[i] != -1 || used[p]) continue;
      assigned[i] = prev[p].id;
      used[p] = true;
    }
    std::vector<Live> next;
    for (int i = 0; i < n; ++i) {
      if (assigned[i] < 0) assigned[i] = d.branches++;
      const auto& e = ps.entries[i];
      d.points.push_back({th, assigned[i], e.lambda, e.multiplicity, e.location});
      next.push_back({assigned[i], e.lambda});
    }
    prev = std::move(next);
  }
  return d;
}

}  // namespace halfspace
