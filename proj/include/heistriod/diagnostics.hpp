#pragma once

// Stationarity instrumentation: curvature statistics against the constant-
// curvature/zero-sum conditions, the multiplier correspondence, and the
// energy/dissipation table of a flow run. The junction angle defect and the
// lifted-triod reconstruction live in lifting.hpp.

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "heistriod/discrete.hpp"
#include "heistriod/flow.hpp"
#include "heistriod/lifting.hpp"

namespace heistriod {

struct StationarityReport {
  double angle_defect = 0.0;
  std::array<double, 3> curvature_means{};
  std::array<double, 3> curvature_stddevs{};
  double curvature_sum = 0.0;  // sum of the per-curve means
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double junction_z_spread = 0.0;
};

struct CurvatureStats {
  std::array<double, 3> means{};
  std::array<double, 3> stddevs{};
  double sum = 0.0;
};

/// Mass-weighted mean and standard deviation of the nodal curvatures of each
/// curve; near a non-degenerate steady state the deviations vanish and the
/// means sum to zero.
inline CurvatureStats curvature_stats(const std::array<std::vector<double>, 3>& kappa,
                                      const TriodState& t) {
  CurvatureStats out;
  const int J = t.segment_count();
  for (int a = 0; a < 3; ++a) {
    const auto g = detail::CurveGeom::build(J, [&](int j) { return t.node(a, j); });
    double mean = 0.0;
    for (int j = 0; j <= J; ++j) mean += g.w[j] * kappa[a][j];
    mean /= g.total;
    double var = 0.0;
    for (int j = 0; j <= J; ++j) {
      const double q = kappa[a][j] - mean;
      var += g.w[j] * q * q;
    }
    out.means[a] = mean;
    out.stddevs[a] = std::sqrt(var / g.total);
    out.sum += mean;
  }
  return out;
}

inline CurvatureStats curvature_stats(const StepSolution& sol, const TriodState& t) {
  return curvature_stats(sol.kappa, t);
}

/// Invert the correspondence mu = (-lambda1, lambda1 - lambda2, lambda2);
/// requires the zero-sum constraint to hold.
inline std::pair<double, double> multiplier_to_lambda(const std::array<double, 3>& mu) {
  const double sum = mu[0] + mu[1] + mu[2];
  const double scale = std::abs(mu[0]) + std::abs(mu[1]) + std::abs(mu[2]);
  if (std::abs(sum) > 1e-10 * (1.0 + scale)) {
    std::ostringstream os;
    os << "multiplier_to_lambda: multipliers do not sum to zero (sum=" << sum << ")";
    throw std::invalid_argument(os.str());
  }
  return {-mu[0], mu[2]};
}

inline StationarityReport stationarity_report(const StepSolution& sol,
                                              const TriodState& t) {
  StationarityReport rep;
  rep.angle_defect = junction_angle_defect(t);
  const CurvatureStats stats = curvature_stats(sol, t);
  rep.curvature_means = stats.means;
  rep.curvature_stddevs = stats.stddevs;
  rep.curvature_sum = stats.sum;
  const auto [l1, l2] = multiplier_to_lambda(sol.mu);
  rep.lambda1 = l1;
  rep.lambda2 = l2;
  rep.junction_z_spread = lift_triod(t).junction_z_spread;
  return rep;
}

/// The time series of a run as a column table; asserts the monotone decrease
/// of the total energy that the scheme guarantees.
inline const std::vector<SeriesRow>& energy_series(const FlowOutcome& outcome) {
  for (std::size_t i = 1; i < outcome.series.size(); ++i) {
    const double before = outcome.series[i - 1].total_length;
    const double after = outcome.series[i].total_length;
    if (after > before + 1e-10 * (1.0 + before)) {
      std::ostringstream os;
      os << "energy_series: total length increased at t=" << outcome.series[i].t
         << " (" << before << " -> " << after << ")";
      throw std::runtime_error(os.str());
    }
  }
  return outcome.series;
}

}  // namespace heistriod
