// halfspace: command-line front end.
//
// Exit codes: 0 ok, 1 validation failure, 2 usage, configuration or domain error.

#include "halfspace/config.hpp"
#include "halfspace/lattice.hpp"
#include "halfspace/linalg.hpp"
#include "halfspace/resolvent.hpp"
#include "halfspace/scattering.hpp"
#include "halfspace/simd/kernels.hpp"
#include "halfspace/spectral_points.hpp"
#include "halfspace/threshold_expansions.hpp"
#include "halfspace/validation.hpp"
#include "halfspace/wave_operator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace halfspace;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

// {"re": rows, "im": rows}
json to_json(const CMat& M) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      r.push_back(M(i, j).real());
      c.push_back(M(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

json to_json(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Tabular output: header plus rows of already formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  template <class... T>
  void add(const T&... cells) {
    std::vector<std::string> r;
    (r.push_back(cell(cells)), ...);
    rows.push_back(std::move(r));
  }

  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class T>
  static std::string cell(const T& x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }

  std::string csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t k = 0; k < r.size(); ++k) out += (k ? "," : "") + r[k];
      out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

struct Output {
  json doc;
  std::optional<Table> table;  // present for commands with a CSV form
  int code = kExitOk;
};

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::vector<double> v;
  std::optional<double> theta;
  std::optional<int> grid_n;
  std::optional<double> s_max;
  std::optional<int> points;
};

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (!o.v.empty()) cfg.v = o.v;
  if (o.theta) cfg.theta = *o.theta;
  if (o.grid_n) cfg.grid_n = *o.grid_n;
  if (o.s_max) cfg.grid_s_max = *o.s_max;
  if (o.points) cfg.theta_points = *o.points;
  if (!o.format.empty()) cfg.format = o.format;
  if (!o.out_path.empty()) cfg.out_dir = o.out_path;
  validate_config(cfg);
  if (cfg.format != "json" && cfg.format != "csv") throw InvalidRun("format must be json or csv");
  return cfg;
}

FiberModel model_of(const RunConfig& cfg) { return FiberModel(make_model(cfg.v, cfg.theta)); }

json model_json(const FiberModel& m) { return {{"v", m.spec.v}, {"theta", m.theta()}, {"N", m.N()}}; }

Output cmd_bands(const RunConfig& cfg) {
  const FiberModel m = model_of(cfg);
  Output out;
  out.doc["model"] = model_json(m);
  Table t{{"channel", "lambda_c", "lo", "hi"}, {}};
  json bands = json::array();
  for (int c = 0; c < m.N(); ++c) {
    bands.push_back({{"channel", c + 1}, {"lambda_c", m.eig.lambda[c]}, {"lo", m.eig.band_lo(c)}, {"hi", m.eig.band_hi(c)}});
    t.add(c + 1, m.eig.lambda[c], m.eig.band_lo(c), m.eig.band_hi(c));
  }
  out.doc["bands"] = bands;
  out.doc["thresholds"] = m.bands.thresholds;
  out.doc["spectrum"] = {m.bands.spectrum_lo, m.bands.spectrum_hi};
  out.table = t;
  return out;
}

Output cmd_spectrum(const RunConfig& cfg, bool with_oracle) {
  const FiberModel m = model_of(cfg);
  const auto ps = point_spectrum(m);
  Output out;
  out.doc["model"] = model_json(m);
  Table t{{"lambda", "multiplicity", "location", "kernel_dim"}, {}};
  json e = json::array();
  for (const auto& x : ps.entries) {
    e.push_back({{"lambda", x.lambda},
                 {"multiplicity", x.multiplicity},
                 {"location", location_name(x.location)},
                 {"kernel_dim", x.kernel_dim}});
    t.add(x.lambda, x.multiplicity, location_name(x.location), x.kernel_dim);
  }
  out.doc["eigenvalues"] = e;
  if (with_oracle) {
    out.doc["truncated_oracle"] = {{"L", cfg.spectrum_L}, {"eigenvalues", truncated_spectrum_oracle(cfg.spectrum_L, m)}};
  }
  out.table = t;
  return out;
}

Output cmd_dispersion(const RunConfig& cfg) {
  const auto d = surface_dispersion(cfg.v, cfg.theta_points);
  Output out;
  out.doc["v"] = cfg.v;
  out.doc["branches"] = d.branches;
  out.doc["ambiguous"] = d.ambiguous;
  out.doc["warnings"] = d.warnings;
  Table t{{"theta", "branch", "lambda", "multiplicity", "location"}, {}};
  json pts = json::array();
  for (const auto& p : d.points) {
    pts.push_back({{"theta", p.theta},
                   {"branch", p.branch},
                   {"lambda", p.lambda},
                   {"multiplicity", p.multiplicity},
                   {"location", location_name(p.location)}});
    t.add(p.theta, p.branch, p.lambda, p.multiplicity, location_name(p.location));
  }
  out.doc["points"] = pts;
  out.table = t;
  return out;
}

Output cmd_resolvent(const RunConfig& cfg, double re, double im) {
  const FiberModel m = model_of(cfg);
  Output out;
  out.doc["model"] = model_json(m);
  out.doc["z"] = to_json(cplx(re, im));
  if (im == 0.0) {
    out.doc["boundary"] = true;
    out.doc["sandwich"] = to_json(boundary_sandwich(re, m));
    out.doc["M"] = to_json(m_matrix_boundary(re, m).value);
  } else {
    out.doc["sandwich"] = to_json(sandwiched_resolvent(cplx(re, im), m));
    out.doc["M"] = to_json(m_matrix(cplx(re, im), m).value);
  }
  return out;
}

int rank_of(const CMat& P) { return static_cast<int>(std::lround(P.trace().real())); }

Output cmd_expand(const RunConfig& cfg, double lambda) {
  const FiberModel m = model_of(cfg);
  const auto d = threshold_expansion(lambda, m);
  Output out;
  out.doc["model"] = model_json(m);
  out.doc["lambda"] = lambda;
  std::vector<int> le, re;
  for (int c : d.left_edge) le.push_back(c + 1);
  for (int c : d.right_edge) re.push_back(c + 1);
  out.doc["left_edge"] = le;
  out.doc["right_edge"] = re;
  out.doc["rank_S"] = {rank_of(d.S0), rank_of(d.S1), rank_of(d.S2)};
  out.doc["S0"] = to_json(d.S0);
  out.doc["S1"] = to_json(d.S1);
  out.doc["S2"] = to_json(d.S2);
  out.doc["I3_invertible"] = d.I3_invertible;
  out.doc["I3_rcond"] = d.I3_rcond;
  json cp = json::object();
  for (int l = 0; l < 3; ++l)
    for (int mm = 0; mm <= l; ++mm) cp["C" + std::to_string(l) + std::to_string(mm)] = opnorm(d.Cprime[l][mm]);
  out.doc["Cprime_norms"] = cp;
  return out;
}

json smatrix_json(const OnShellSMatrix& S) {
  std::vector<int> open;
  for (int c : S.open_channels) open.push_back(c + 1);
  return {{"lambda", S.lambda},
          {"open_channels", open},
          {"S", to_json(S.assembled)},
          {"unitarity_defect", unitarity_defect(S.assembled)}};
}

Output cmd_smatrix(const RunConfig& cfg, double lambda) {
  const FiberModel m = model_of(cfg);
  Output out;
  out.doc = smatrix_json(onshell_smatrix(lambda, m));
  out.doc["model"] = model_json(m);
  return out;
}

Output cmd_smatrix_scan(const RunConfig& cfg, int band, int points) {
  const FiberModel m = model_of(cfg);
  if (band < 1 || band > m.N()) throw InvalidRun("band must be in 1..N");
  std::vector<double> emb;
  for (const auto& e : point_spectrum(m).entries)
    if (e.location == EigenLocation::embedded) emb.push_back(e.lambda);
  Output out;
  out.doc["model"] = model_json(m);
  out.doc["band"] = band;
  out.doc["embedded_eigenvalues"] = emb;
  Table t{{"lambda", "j", "jp", "re", "im", "unitarity_defect"}, {}};
  json rows = json::array();
  for (const auto& S : smatrix_scan(band - 1, points, m, emb)) {
    rows.push_back(smatrix_json(S));
    const double u = unitarity_defect(S.assembled);
    for (std::size_t a = 0; a < S.open_channels.size(); ++a)
      for (std::size_t b = 0; b < S.open_channels.size(); ++b)
        t.add(S.lambda, S.open_channels[a] + 1, S.open_channels[b] + 1, S.assembled(a, b).real(),
              S.assembled(a, b).imag(), u);
  }
  out.doc["points"] = rows;
  out.table = t;
  return out;
}

Output cmd_threshold_limits(const RunConfig& cfg, double lambda) {
  const FiberModel m = model_of(cfg);
  const auto rep = threshold_limit(lambda, m);
  Output out;
  out.doc["model"] = model_json(m);
  out.doc["lambda"] = lambda;
  Table t{{"side", "j", "jp", "class", "re", "im"}, {}};
  for (ApproachSide s : {ApproachSide::from_right, ApproachSide::from_left}) {
    const auto& sl = rep.side(s);
    json pairs = json::array();
    for (const auto& p : sl.pairs) {
      json e{{"j", p.j + 1}, {"jp", p.jp + 1}, {"class", pair_class_name(p.cls)}};
      if (p.cls != PairClass::undefined) e["value"] = to_json(p.value);
      pairs.push_back(e);
      t.add(side_name(s), p.j + 1, p.jp + 1, pair_class_name(p.cls),
            p.cls == PairClass::undefined ? std::string() : Table::cell(p.value.real()),
            p.cls == PairClass::undefined ? std::string() : Table::cell(p.value.imag()));
    }
    std::vector<int> open;
    for (int c : sl.open_channels) open.push_back(c + 1);
    out.doc[side_name(s)] = {{"open_channels", open}, {"pairs", pairs}, {"S", to_json(sl.assembled)}};
  }
  out.table = t;
  return out;
}

json degeneracy_json(const DegeneracyReport& d) {
  return {{"applicable", d.applicable},     {"theta_zero", d.theta_zero},
          {"n_even", d.n_even},             {"sigma_ratio", d.sigma_ratio},
          {"independent", d.independent},   {"norm_top_half", d.norm_top_half},
          {"norm_half_top", d.norm_half_top}, {"conditions_agree", d.conditions_agree},
          {"special_form", d.special_form}};
}

Output cmd_waveop(const RunConfig& cfg) {
  const FiberModel m = model_of(cfg);
  const auto g = make_grid(cfg.grid_n, cfg.grid_s_max);
  const auto w = wave_operator(m, g, true);
  Output out;
  out.doc["model"] = model_json(m);
  out.doc["grid"] = {{"n", g.n}, {"s_max", g.s_max}, {"h", g.h}};
  out.doc["degeneracy"] = degeneracy_json(degeneracy_report(m));
  out.doc["compactness_ratio"] = compactness_ratio(w.sv_remainder, g.n);
  out.doc["isometry"] = isometry_ratio(w.assembled, band_limited_vector(g, m.N(), cfg.seed));
  out.doc["singular_values"] = {{"leading", to_json(w.sv_leading)},
                                {"K", to_json(w.sv_K)},
                                {"remainder", to_json(w.sv_remainder)},
                                {"assembled", to_json(w.sv_assembled)}};
  out.doc["log"] = w.log;
  Table t{{"part", "k", "sigma"}, {}};
  const std::pair<const char*, const RVec*> parts[] = {
      {"leading", &w.sv_leading}, {"K", &w.sv_K}, {"remainder", &w.sv_remainder}, {"assembled", &w.sv_assembled}};
  for (const auto& [name, sv] : parts)
    for (Eigen::Index k = 0; k < sv->size(); ++k) t.add(name, k + 1, (*sv)[k]);
  out.table = t;
  return out;
}

Output cmd_waveop_scan(const RunConfig& cfg) {
  const auto g = make_grid(cfg.grid_n, cfg.grid_s_max);
  Output out;
  out.doc["v"] = cfg.v;
  out.doc["grid"] = {{"n", g.n}, {"s_max", g.s_max}};
  Table t{{"theta", "norm_leading", "norm_K", "norm_remainder", "isometry", "degenerate"}, {}};
  json rows = json::array();
  for (const auto& f : wave_operator_scan(cfg.v, cfg.theta_points, g, cfg.seed)) {
    rows.push_back({{"theta", f.theta},
                    {"norm_leading", f.norm_leading},
                    {"norm_K", f.norm_K},
                    {"norm_remainder", f.norm_remainder},
                    {"isometry", f.isometry},
                    {"degenerate", f.degenerate}});
    t.add(f.theta, f.norm_leading, f.norm_K, f.norm_remainder, f.isometry, f.degenerate ? 1 : 0);
  }
  out.doc["fibers"] = rows;
  out.table = t;
  return out;
}

Output cmd_degeneracy(const RunConfig& cfg) {
  const FiberModel m = model_of(cfg);
  const auto d = degeneracy_report(m);
  Output out;
  out.doc = degeneracy_json(d);
  out.doc["model"] = model_json(m);
  out.doc["v_xi_top"] = to_json(CMat(d.v_xi_top));
  out.doc["v_xi_half"] = to_json(CMat(d.v_xi_half));
  return out;
}

Output cmd_validate(const RunConfig& cfg) {
  const auto rep = run_validation_suite(cfg);
  Output out;
  out.doc["seed"] = rep.seed;
  out.doc["simd_backend"] = std::string(simd::backend_name(simd::active_backend()));
  Table t{{"id", "status", "measured", "tolerance", "seconds", "name"}, {}};
  json items = json::array();
  for (const auto& r : rep.items) {
    const std::string status = r.pass ? "PASS" : r.known_deviation ? "FAIL (known deviation)" : "FAIL";
    items.push_back({{"id", r.id},
                     {"name", r.name},
                     {"status", status},
                     {"measured", r.measured},
                     {"tolerance", r.tolerance},
                     {"seconds", r.seconds},
                     {"detail", r.detail},
                     {"reason", r.reason}});
    t.add(r.id, status, r.measured, r.tolerance, r.seconds, "\"" + r.name + "\"");
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.id << "  " << r.name << "\n";
  }
  out.doc["items"] = items;
  out.doc["failures"] = rep.failures();
  out.table = t;
  out.code = rep.failures() == 0 ? kExitOk : kExitValidation;
  return out;
}

void emit(const Output& out, const RunConfig& cfg, const std::string& name) {
  std::string text;
  if (cfg.format == "csv") {
    if (!out.table) throw InvalidRun(name + " has no csv form");
    text = out.table->csv();
  } else {
    text = out.doc.dump(2) + "\n";
  }
  if (cfg.out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  const auto path = std::filesystem::path(cfg.out_dir) / (name + "." + cfg.format);
  std::ofstream f(path);
  if (!f) throw InvalidRun("cannot write " + path.string());
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-space lattice scattering: spectra, S matrices, wave operators"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", o.out_path, "write <command>.<format> into this directory instead of stdout");
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto model_flags = [&](CLI::App* c) {
    c->add_option("--v", o.v, "boundary potential v_1 ... v_N")->delimiter(',');
    c->add_option("--theta", o.theta, "fiber angle");
  };
  auto grid_flags = [&](CLI::App* c) {
    c->add_option("--n", o.grid_n, "grid size (odd)");
    c->add_option("--s-max", o.s_max, "grid half width in the rescaled variable");
  };

  double lambda = 0.0, re = 0.0, im = 0.0;
  int band = 1, points = 200;
  bool with_oracle = false;

  auto* bands = app.add_subcommand("bands", "band edges and thresholds");
  auto* spectrum = app.add_subcommand("spectrum", "point spectrum of the fiber");
  spectrum->add_flag("--oracle", with_oracle, "also list the truncated-lattice eigenvalues");
  auto* dispersion = app.add_subcommand("dispersion", "surface-state branches over theta");
  dispersion->add_option("--points", o.points, "number of theta samples");
  auto* resolvent = app.add_subcommand("resolvent", "sandwiched free resolvent and M at z");
  resolvent->add_option("--re", re, "Re z")->required();
  resolvent->add_option("--im", im, "Im z; 0 gives the boundary value from above");
  auto* expand = app.add_subcommand("expand", "threshold expansion data");
  expand->add_option("--lambda", lambda, "threshold")->required();
  auto* smatrix = app.add_subcommand("smatrix", "on-shell S matrix");
  smatrix->add_option("--lambda", lambda, "energy")->required();
  auto* scan = app.add_subcommand("smatrix-scan", "S matrix across one band");
  scan->add_option("--band", band, "band index 1..N");
  scan->add_option("--points", points, "interior sample count");
  auto* limits = app.add_subcommand("threshold-limits", "one-sided S matrix limits at a threshold");
  limits->add_option("--lambda", lambda, "threshold")->required();
  auto* waveop = app.add_subcommand("waveop", "discretized wave operator: singular values and degeneracy");
  auto* waveop_scan = app.add_subcommand("waveop-scan", "wave operator norms over theta");
  waveop_scan->add_option("--points", o.points, "number of theta samples");
  auto* degeneracy = app.add_subcommand("degeneracy", "degeneracy conditions at theta = 0");
  auto* validate = app.add_subcommand("validate", "run the acceptance criteria");
  std::vector<int> suite;
  validate->add_option("--suite", suite, "criteria to run")->delimiter(',');

  for (auto* c : {bands, spectrum, resolvent, expand, smatrix, scan, limits, waveop, degeneracy}) model_flags(c);
  for (auto* c : {dispersion, waveop_scan}) c->add_option("--v", o.v, "boundary potential")->delimiter(',');
  for (auto* c : {waveop, waveop_scan}) grid_flags(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = resolve(o);
    if (!suite.empty()) cfg.suite = suite;
    Output out;
    std::string name;
    if (*bands) name = "bands", out = cmd_bands(cfg);
    else if (*spectrum) name = "spectrum", out = cmd_spectrum(cfg, with_oracle);
    else if (*dispersion) name = "dispersion", out = cmd_dispersion(cfg);
    else if (*resolvent) name = "resolvent", out = cmd_resolvent(cfg, re, im);
    else if (*expand) name = "expand", out = cmd_expand(cfg, lambda);
    else if (*smatrix) name = "smatrix", out = cmd_smatrix(cfg, lambda);
    else if (*scan) name = "smatrix-scan", out = cmd_smatrix_scan(cfg, band, points);
    else if (*limits) name = "threshold-limits", out = cmd_threshold_limits(cfg, lambda);
    else if (*waveop) name = "waveop", out = cmd_waveop(cfg);
    else if (*waveop_scan) name = "waveop-scan", out = cmd_waveop_scan(cfg);
    else if (*degeneracy) name = "degeneracy", out = cmd_degeneracy(cfg);
    else name = "validate", out = cmd_validate(cfg);
    emit(out, cfg, name);
    return out.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
