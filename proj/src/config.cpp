#include "halfspace/config.hpp"

#include "halfspace/common.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace halfspace {

namespace pt = boost::property_tree;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    const std::string tok = item.substr(b, e - b + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw InvalidRun("not a number: '" + tok + "'");
    }
    if (used != tok.size()) throw InvalidRun("not a number: '" + tok + "'");
    out.push_back(x);
  }
  return out;
}

namespace {

const std::set<std::string> kKeys{"model.v",          "model.theta",         "grid.n",
                                  "grid.s_max",       "grid.theta_points",   "oracle.lattice_L",
                                  "oracle.spectrum_L", "oracle.timedomain_L", "oracle.timedomain_T",
                                  "oracle.quad_tol",  "validation.suite",    "validation.seed",
                                  "output.dir",       "output.format"};

template <class T>
T get(const pt::ptree& t, const std::string& key, T fallback) {
  const auto v = t.get_optional<std::string>(key);
  if (!v) return fallback;
  try {
    return t.get<T>(key);
  } catch (const pt::ptree_error&) {
    throw InvalidRun("bad value for " + key + ": '" + *v + "'");
  }
}

RunConfig from_tree(const pt::ptree& t) {
  for (const auto& sec : t) {
    if (sec.second.empty()) throw InvalidRun("key outside a section: " + sec.first);
    for (const auto& kv : sec.second) {
      const std::string key = sec.first + "." + kv.first;
      if (!kKeys.count(key)) throw InvalidRun("unknown config key: " + key);
    }
  }
  RunConfig c;
  if (auto v = t.get_optional<std::string>("model.v")) c.v = parse_list(*v);
  c.theta = get(t, "model.theta", c.theta);
  c.grid_n = get(t, "grid.n", c.grid_n);
  c.grid_s_max = get(t, "grid.s_max", c.grid_s_max);
  c.theta_points = get(t, "grid.theta_points", c.theta_points);
  c.lattice_L = get(t, "oracle.lattice_L", c.lattice_L);
  c.spectrum_L = get(t, "oracle.spectrum_L", c.spectrum_L);
  c.timedomain_L = get(t, "oracle.timedomain_L", c.timedomain_L);
  c.timedomain_T = get(t, "oracle.timedomain_T", c.timedomain_T);
  c.quad_tol = get(t, "oracle.quad_tol", c.quad_tol);
  if (auto s = t.get_optional<std::string>("validation.suite")) {
    c.suite.clear();
    if (boost::algorithm::trim_copy(*s) == "all") {
      for (int k = 1; k <= 11; ++k) c.suite.push_back(k);
    } else {
      for (double x : parse_list(*s)) {
        if (x != std::floor(x)) throw InvalidRun("suite entries are criterion numbers");
        c.suite.push_back(static_cast<int>(x));
      }
    }
  }
  c.seed = get(t, "validation.seed", c.seed);
  c.out_dir = get(t, "output.dir", c.out_dir);
  c.format = get(t, "output.format", c.format);
  validate_config(c);
  return c;
}

}  // namespace

void validate_config(const RunConfig& c) {
  if (c.v.size() < 2) throw InvalidRun("model.v needs at least two entries");
  if (std::all_of(c.v.begin(), c.v.end(), [](double x) { return x == 0.0; }))
    throw InvalidRun("model.v must not vanish identically");
  if (c.grid_n < 5 || c.grid_n % 2 == 0) throw InvalidRun("grid.n must be odd and >= 5");
  if (!(c.grid_s_max > 0.0)) throw InvalidRun("grid.s_max must be positive");
  if (c.theta_points < 1) throw InvalidRun("grid.theta_points must be >= 1");
  for (int L : {c.lattice_L, c.spectrum_L, c.timedomain_L})
    if (L < 100) throw InvalidRun("oracle sizes must satisfy L >= 100");
  if (!(c.timedomain_T > 0.0) || c.timedomain_T > 0.4 * c.timedomain_L)
    throw InvalidRun("oracle.timedomain_T must lie in (0, 0.4 timedomain_L]");
  if (!(c.quad_tol > 0.0)) throw InvalidRun("oracle.quad_tol must be positive");
  for (int k : c.suite)
    if (k < 1 || k > 11) throw InvalidRun("suite entries must be in 1..11");
  if (c.format != "json" && c.format != "csv") throw InvalidRun("output.format must be json or csv");
}

RunConfig parse_config(const std::string& ini_text) {
  pt::ptree t;
  std::istringstream is(ini_text);
  try {
    pt::read_ini(is, t);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidRun(std::string("config: ") + e.what());
  }
  return from_tree(t);
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidRun("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace halfspace
