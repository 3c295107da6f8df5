// Acceptance run: one PASS/FAIL line per item. Known deviations still print FAIL, with the
// reason, but do not change the exit code.
//
//   acceptance            all criteria
//   acceptance 3 7 10     selected criteria

#include "halfspace/simd/kernels.hpp"
#include "halfspace/validation.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  halfspace::RunConfig cfg;
  if (argc > 1) {
    cfg.suite.clear();
    for (int k = 1; k < argc; ++k) cfg.suite.push_back(std::atoi(argv[k]));
  }
  std::printf("seed %llu, simd backend %s\n", static_cast<unsigned long long>(cfg.seed),
              std::string(halfspace::simd::backend_name(halfspace::simd::active_backend())).c_str());

  const auto rep = halfspace::run_validation_suite(cfg);
  for (const auto& r : rep.items) {
    std::printf("%s %-4s %-78s measured %.3e  tol %.3e  (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                r.name.c_str(), r.measured, r.tolerance, r.seconds);
    if (!r.detail.empty()) std::printf("          %s\n", r.detail.c_str());
    if (r.known_deviation) std::printf("          known deviation: %s\n", r.reason.c_str());
  }
  const int fails = rep.failures();
  std::printf("%d item(s), %d unexpected failure(s)\n", static_cast<int>(rep.items.size()), fails);
  return fails == 0 ? 0 : 1;
}
