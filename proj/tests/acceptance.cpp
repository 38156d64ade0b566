// Acceptance runner: executes the reference checks end to end and prints one
// pass/fail line per criterion.

#include <cstdio>
#include <vector>

#include "heistriod/verify.hpp"

int main() {
  using namespace heistriod;
  ExperimentCache cache;
  std::vector<CheckResult> results;
  results.push_back(check_steiner_fixed_point());
  results.push_back(check_exp2_terminal(cache));
  results.push_back(check_exp4_terminal(cache));
  results.push_back(check_singularity_times(cache));
  results.push_back(check_unconditional_stability());
  results.push_back(check_geodesic_oracle());
  results.push_back(check_single_curve_convergence());
  results.push_back(check_stationarity(cache));
  results.push_back(check_constraint_drift_order());
  results.push_back(check_determinism("acceptance_out"));

  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CheckResult& r = results[i];
    std::printf("criterion %2zu [%s] %s: %s\n", i + 1, r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL");
  return all ? 0 : 1;
}
