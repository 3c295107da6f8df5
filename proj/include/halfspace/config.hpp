#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace halfspace {

// Flat INI file, all keys optional:
//
//   [model]       v = 1, -1        theta = 1.5707963
//   [grid]        n = 513          s_max = 8         theta_points = 16
//   [oracle]      lattice_L = 4000 spectrum_L = 2000 timedomain_L = 2000  timedomain_T = 400
//                 quad_tol = 1e-10
//   [validation]  suite = 1, 2, 3  seed = 20240611   (suite = all, or empty for none)
//   [output]      dir = out        format = json
struct RunConfig {
  std::vector<double> v{1.0, -1.0};
  double theta = 1.5707963267948966;

  int grid_n = 513;
  double grid_s_max = 8.0;
  int theta_points = 16;

  int lattice_L = 4000;
  int spectrum_L = 2000;
  int timedomain_L = 2000;
  double timedomain_T = 400.0;
  double quad_tol = 1e-10;

  std::vector<int> suite{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  std::uint64_t seed = 20240611;

  std::string out_dir;
  std::string format = "json";
};

// Throws InvalidRun on unknown sections or keys, malformed values, or violated invariants
// (tolerances > 0, oracle sizes L >= 100, T <= 0.4 L, odd grid n >= 5).
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& ini_text);
void validate_config(const RunConfig& cfg);

std::vector<double> parse_list(const std::string& text);

}  // namespace halfspace
