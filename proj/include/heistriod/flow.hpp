#pragma once

// Fully discrete, unconditionally stable finite element scheme for the
// constrained shortening flow of horizontal triods. Each time step solves one
// linear system in the node displacements, the nodal curvatures and the three
// multipliers (with zero sum); the discrete energy inequality
//
//   L(c^{m+1}) + dt * sum_a int^h (kappa - mu_a)^2 |du c^m_a|  <=  L(c^m)
//
// holds for every time step size and is asserted after every solve. A
// single-curve specialization with one scalar multiplier drives the
// fixed-endpoint flow of one horizontal curve.

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heistriod/discrete.hpp"
#include "heistriod/geometry.hpp"
#include "heistriod/lifting.hpp"

namespace heistriod {

struct FlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystemError : FlowError {
  int curve;  // 0-based index of an offending curve, -1 if unidentified
  SingularSystemError(int curve_, const std::string& msg)
      : FlowError(msg), curve(curve_) {}
};

struct StabilityViolationError : FlowError {
  using FlowError::FlowError;
};

struct StepReport {
  double energy_before = 0.0;
  double energy_after = 0.0;
  double dissipation = 0.0;      // dt * sum_a int^h (kappa - mu_a)^2 |du c^m|
  double residual_fdc = 0.0;     // max pairwise mismatch of the flux equalities
  double linear_residual = 0.0;  // relative residual of the linear solve
  std::array<bool, 3> assumption_ok{true, true, true};
};

struct StepSolution {
  std::array<std::vector<Vec2>, 3> delta;    // per curve, J+1 nodes; [0] shared
  std::array<std::vector<double>, 3> kappa;  // per curve, J+1 nodal values
  std::array<double, 3> mu{};                // multipliers, sum zero
  StepReport report;

  double max_displacement() const {
    double m = 0.0;
    for (const auto& d : delta)
      for (const Vec2& v : d) m = std::max(m, norm(v));
    return m;
  }
};

namespace detail {

// per-segment geometry of one curve in the current state
struct CurveGeom {
  std::vector<double> len;  // len[j], j = 1..J (index 0 unused)
  std::vector<Vec2> nrm;    // unit normals, same indexing
  std::vector<double> w;    // lumped node weights, j = 0..J
  double total = 0.0;

  template <typename NodeFn>
  static CurveGeom build(int J, NodeFn&& node) {
    CurveGeom g;
    g.len.assign(J + 1, 0.0);
    g.nrm.assign(J + 1, Vec2{});
    g.w.assign(J + 1, 0.0);
    for (int j = 1; j <= J; ++j) {
      const Vec2 d = node(j) - node(j - 1);
      const double l = norm(d);
      if (!(l > 0.0)) {
        std::ostringstream os;
        os << "degenerate segment " << j;
        throw FlowError(os.str());
      }
      g.len[j] = l;
      g.nrm[j] = (1.0 / l) * perp(d);
      g.total += l;
    }
    for (int j = 0; j <= J; ++j) {
      double w = 0.0;
      if (j >= 1) w += g.len[j];
      if (j <= J - 1) w += g.len[j + 1];
      g.w[j] = 0.5 * w;
    }
    return g;
  }

  // mass-weighted averaged normal at node j (the velocity test vector)
  Vec2 avg_normal(int j, int J) const {
    Vec2 v{};
    if (j >= 1) v += 0.5 * len[j] * nrm[j];
    if (j <= J - 1) v += 0.5 * len[j + 1] * nrm[j + 1];
    return v;
  }
};

}  // namespace detail

/// Solvability condition of the scheme: for each curve, the span of the
/// mass-weighted averaged normals at interior nodes must be nontrivial.
/// Virtually always true; the canonical violation is J = 2 with a curve
/// folded back onto itself.
inline std::array<bool, 3> check_assumption_A(const TriodState& t) {
  const int J = t.segment_count();
  std::array<bool, 3> ok{};
  for (int a = 0; a < 3; ++a) {
    const auto g = detail::CurveGeom::build(J, [&](int j) { return t.node(a, j); });
    bool any = false;
    for (int i = 1; i <= J - 1 && !any; ++i) {
      const Vec2 v = g.avg_normal(i, J);
      any = norm(v) > 1e-12 * 0.5 * (g.len[i] + g.len[i + 1]);
    }
    ok[a] = any;
  }
  return ok;
}

/// The linear system of one time step: unknowns are the interior/junction
/// displacement components, all nodal curvatures, and two multipliers (the
/// third is eliminated through the zero-sum constraint).
struct AssembledStep {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  int J = 0;

  int unknowns() const { return static_cast<int>(rhs.size()); }
  int delta_count() const { return 6 * J - 4; }
  // component r in {0,1} of the junction displacement
  int junction_index(int r) const { return r; }
  // component r of the displacement of node j on curve alpha; -1 if pinned
  int delta_index(int alpha, int j, int r) const {
    if (j == 0) return r;
    if (j >= J) return -1;
    return 2 + 2 * (alpha * (J - 1) + (j - 1)) + r;
  }
  int kappa_index(int alpha, int j) const {
    return delta_count() + alpha * (J + 1) + j;
  }
  int mu_index(int k) const { return delta_count() + 3 * (J + 1) + k; }
};

namespace detail {

inline void assemble_triod(const TriodState& t, double dt, AssembledStep& sys,
                           std::vector<Eigen::Triplet<double>>& trip,
                           std::array<CurveGeom, 3>& geom) {
  const int J = t.segment_count();
  if (J < 2) throw FlowError("step: need at least 2 segments per curve");
  if (!(dt > 0.0)) throw FlowError("step: time step must be positive");
  sys.J = J;
  const int n = 9 * J + 1;
  trip.clear();
  trip.reserve(40 * J);
  sys.rhs = Eigen::VectorXd::Zero(n);

  for (int a = 0; a < 3; ++a)
    geom[a] = CurveGeom::build(J, [&](int j) { return t.node(a, j); });

  auto add = [&](int r, int c, double v) { trip.emplace_back(r, c, v); };
  auto add_mu = [&](int row, int a, double coeff) {
    // mu_3 = -mu_1 - mu_2
    if (a < 2)
      add(row, sys.mu_index(a), coeff);
    else {
      add(row, sys.mu_index(0), -coeff);
      add(row, sys.mu_index(1), -coeff);
    }
  };

  // velocity rows: (delta c / dt) . n  =  kappa - mu, tested at every node
  for (int a = 0; a < 3; ++a) {
    const CurveGeom& g = geom[a];
    for (int j = 0; j <= J; ++j) {
      const int row = a * (J + 1) + j;
      const Vec2 v = g.avg_normal(j, J);
      const int ix = sys.delta_index(a, j, 0);
      if (ix >= 0) {
        add(row, ix, v.x / dt);
        add(row, ix + 1, v.y / dt);
      }
      add(row, sys.kappa_index(a, j), -g.w[j]);
      add_mu(row, a, g.w[j]);
    }
  }

  // curvature rows: kappa n . eta + exact stiffness of c^{m+1}, eta in V0
  const int bj = 3 * (J + 1);  // two junction-coupled rows first
  for (int r = 0; r < 2; ++r) {
    double diag = 0.0;
    double rhs = 0.0;
    for (int a = 0; a < 3; ++a) {
      const CurveGeom& g = geom[a];
      const double inv = 1.0 / g.len[1];
      add(bj + r, sys.kappa_index(a, 0),
          0.5 * g.len[1] * (r == 0 ? g.nrm[1].x : g.nrm[1].y));
      const int i1 = sys.delta_index(a, 1, r);
      if (i1 >= 0) add(bj + r, i1, -inv);
      diag += inv;
      const Vec2 d = t.node(a, 1) - t.node(a, 0);
      rhs += (r == 0 ? d.x : d.y) * inv;
    }
    add(bj + r, sys.junction_index(r), diag);
    sys.rhs[bj + r] = rhs;
  }
  for (int a = 0; a < 3; ++a) {
    const CurveGeom& g = geom[a];
    for (int i = 1; i <= J - 1; ++i) {
      const Vec2 v = g.avg_normal(i, J);
      const double invl = 1.0 / g.len[i];
      const double invr = 1.0 / g.len[i + 1];
      for (int r = 0; r < 2; ++r) {
        const int row = bj + 2 + 2 * (a * (J - 1) + (i - 1)) + r;
        add(row, sys.kappa_index(a, i), r == 0 ? v.x : v.y);
        add(row, sys.delta_index(a, i, r), invl + invr);
        const int il = sys.delta_index(a, i - 1, r);
        if (il >= 0) add(row, il, -invl);
        const int ir = sys.delta_index(a, i + 1, r);
        if (ir >= 0) add(row, ir, -invr);
        const Vec2 dl = t.node(a, i) - t.node(a, i - 1);
        const Vec2 dr = t.node(a, i + 1) - t.node(a, i);
        sys.rhs[row] = -((r == 0 ? dl.x : dl.y) * invl - (r == 0 ? dr.x : dr.y) * invr);
      }
    }
  }

  // flux-equality rows: int^h (kappa - mu_a) |du c^m_a| equal across curves
  for (int r = 0; r < 2; ++r) {
    const int row = n - 2 + r;
    const int a1 = r, a2 = r + 1;
    for (int j = 0; j <= J; ++j) {
      add(row, sys.kappa_index(a1, j), geom[a1].w[j]);
      add(row, sys.kappa_index(a2, j), -geom[a2].w[j]);
    }
    add_mu(row, a1, -geom[a1].total);
    add_mu(row, a2, geom[a2].total);
  }
}

}  // namespace detail

/// Assemble the one-step system without solving it (the square matrix is
/// nonsingular whenever check_assumption_A passes).
inline AssembledStep assemble_step(const TriodState& t, double dt) {
  AssembledStep sys;
  std::vector<Eigen::Triplet<double>> trip;
  std::array<detail::CurveGeom, 3> geom;
  detail::assemble_triod(t, dt, sys, trip, geom);
  const int n = 9 * t.segment_count() + 1;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

/// One implicit time step; reusable across steps so the sparsity analysis is
/// done once per grid.
///
/// Internally the curvature unknowns are eliminated through the velocity
/// rows (each couples one nodal curvature to that node's displacement and
/// the curve's multiplier only), leaving a symmetric positive definite
/// displacement system plus a 2x2 Schur complement for the multipliers.
/// The elimination is exact, so the result solves the full square system.
class TriodStepper {
 public:
  std::pair<TriodState, StepSolution> step(const TriodState& t, double dt) {
    const int J = t.segment_count();
    if (J < 2) throw FlowError("step: need at least 2 segments per curve");
    if (!(dt > 0.0)) throw FlowError("step: time step must be positive");
    std::array<detail::CurveGeom, 3> geom;
    for (int a = 0; a < 3; ++a)
      geom[a] = detail::CurveGeom::build(J, [&](int j) { return t.node(a, j); });

    const int ndc = 6 * J - 4;
    auto dc_ix = [&](int alpha, int j, int r) {
      if (j == 0) return r;
      if (j >= J) return -1;
      return 2 + 2 * (alpha * (J - 1) + (j - 1)) + r;
    };

    trip_.clear();
    trip_.reserve(30 * J);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ndc);
    std::array<Eigen::VectorXd, 3> g;  // constraint/multiplier load vectors
    for (auto& v : g) v = Eigen::VectorXd::Zero(ndc);
    auto add = [&](int r, int c, double v) { trip_.emplace_back(r, c, v); };

    for (int a = 0; a < 3; ++a) {
      const detail::CurveGeom& gm = geom[a];
      for (int j = 0; j <= J - 1; ++j) {
        const int ix = dc_ix(a, j, 0);
        if (ix < 0) continue;
        const Vec2 v = gm.avg_normal(j, J);
        // velocity outer product from the curvature elimination
        const double s = 1.0 / (dt * gm.w[j]);
        add(ix, ix, s * v.x * v.x);
        add(ix, ix + 1, s * v.x * v.y);
        add(ix + 1, ix, s * v.y * v.x);
        add(ix + 1, ix + 1, s * v.y * v.y);
        g[a][ix] += v.x;
        g[a][ix + 1] += v.y;
      }
      // exact stiffness of the piecewise-affine update
      for (int s = 1; s <= J; ++s) {
        const double inv = 1.0 / gm.len[s];
        const int il = dc_ix(a, s - 1, 0);
        const int ir = dc_ix(a, s, 0);
        const Vec2 d = t.node(a, s) - t.node(a, s - 1);
        for (int r = 0; r < 2; ++r) {
          const double dr = r == 0 ? d.x : d.y;
          if (il >= 0) {
            add(il + r, il + r, inv);
            b[il + r] += dr * inv;
          }
          if (ir >= 0) {
            add(ir + r, ir + r, inv);
            b[ir + r] -= dr * inv;
          }
          if (il >= 0 && ir >= 0) {
            add(il + r, ir + r, -inv);
            add(ir + r, il + r, -inv);
          }
        }
      }
    }

    Eigen::SparseMatrix<double> K(ndc, ndc);
    K.setFromTriplets(trip_.begin(), trip_.end());
    if (!analyzed_ || analyzed_J_ != J) {
      ldlt_.analyzePattern(K);
      analyzed_ = true;
      analyzed_J_ = J;
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success)
      throw SingularSystemError(-1, "displacement block is not positive definite");

    // multiplier columns B = (g1-g3, g2-g3); constraints C = (g1-g2, g2-g3)
    const Eigen::VectorXd B0 = g[0] - g[2];
    const Eigen::VectorXd B1 = g[1] - g[2];
    const Eigen::VectorXd C0 = g[0] - g[1];
    const Eigen::VectorXd C1 = g[1] - g[2];
    const Eigen::VectorXd zb = ldlt_.solve(b);
    const Eigen::VectorXd z0 = ldlt_.solve(B0);
    const Eigen::VectorXd z1 = ldlt_.solve(B1);
    Eigen::Matrix2d S;
    S << C0.dot(z0), C0.dot(z1), C1.dot(z0), C1.dot(z1);
    const Eigen::Vector2d srhs(C0.dot(zb), C1.dot(zb));
    const double spivot = std::abs(S(0, 0)) + std::abs(S(0, 1)) +
                          std::abs(S(1, 0)) + std::abs(S(1, 1));
    if (!(std::abs(S.determinant()) > 1e-14 * (1e-300 + spivot * spivot))) {
      const auto ok = check_assumption_A(t);
      int bad = -1;
      for (int a = 0; a < 3; ++a)
        if (!ok[a]) bad = a;
      std::ostringstream os;
      os << "singular step system";
      if (bad >= 0) os << ": solvability condition fails on curve " << (bad + 1);
      throw SingularSystemError(bad, os.str());
    }
    Eigen::Vector2d mu = S.partialPivLu().solve(srhs);
    Eigen::VectorXd x = zb - mu[0] * z0 - mu[1] * z1;
    // one refinement pass against the reduced saddle system
    {
      const Eigen::VectorXd rb = b - K * x - mu[0] * B0 - mu[1] * B1;
      const Eigen::VectorXd zr = ldlt_.solve(rb);
      const Eigen::Vector2d crhs(C0.dot(zr) + C0.dot(x), C1.dot(zr) + C1.dot(x));
      const Eigen::Vector2d dmu = S.partialPivLu().solve(crhs);
      x += zr - dmu[0] * z0 - dmu[1] * z1;
      mu += dmu;
    }

    StepSolution sol;
    {
      const Eigen::VectorXd rb = b - K * x - mu[0] * B0 - mu[1] * B1;
      const double rc = std::max(std::abs(C0.dot(x)), std::abs(C1.dot(x)));
      sol.report.linear_residual =
          std::max(rb.lpNorm<Eigen::Infinity>(), rc) /
          (1.0 + b.lpNorm<Eigen::Infinity>());
    }
    sol.mu[0] = mu[0];
    sol.mu[1] = mu[1];
    sol.mu[2] = -sol.mu[0] - sol.mu[1];
    for (int a = 0; a < 3; ++a) {
      sol.delta[a].assign(J + 1, Vec2{});
      sol.kappa[a].assign(J + 1, 0.0);
      for (int j = 0; j <= J; ++j) {
        const int ix = dc_ix(a, j, 0);
        if (ix >= 0) sol.delta[a][j] = {x[ix], x[ix + 1]};
        const Vec2 v = geom[a].avg_normal(j, J);
        sol.kappa[a][j] =
            sol.mu[a] + dot(sol.delta[a][j], v) / (dt * geom[a].w[j]);
      }
    }
    sol.report.assumption_ok = check_assumption_A(t);

    TriodState next = t;
    next.set_junction(t.junction() + sol.delta[0][0]);
    for (int a = 0; a < 3; ++a)
      for (int j = 1; j <= J - 1; ++j)
        next.set_node(a, j, t.node(a, j) + sol.delta[a][j]);

    sol.report.energy_before = t.total_length();
    sol.report.energy_after = next.total_length();
    double diss = 0.0;
    std::array<double, 3> flux{};
    for (int a = 0; a < 3; ++a) {
      for (int j = 0; j <= J; ++j) {
        const double q = sol.kappa[a][j] - sol.mu[a];
        diss += geom[a].w[j] * q * q;
        flux[a] += geom[a].w[j] * q;
      }
    }
    sol.report.dissipation = dt * diss;
    sol.report.residual_fdc =
        std::max({std::abs(flux[0] - flux[1]), std::abs(flux[1] - flux[2]),
                  std::abs(flux[0] - flux[2])});

    const double slack = sol.report.energy_before +
                         1e-10 * (1.0 + sol.report.energy_before) -
                         sol.report.energy_after - sol.report.dissipation;
    if (slack < 0.0) {
      std::ostringstream os;
      os << "energy inequality violated by " << -slack
         << " (before=" << sol.report.energy_before
         << ", after=" << sol.report.energy_after
         << ", dissipation=" << sol.report.dissipation << ")";
      throw StabilityViolationError(os.str());
    }
    return {std::move(next), std::move(sol)};
  }

 private:
  std::vector<Eigen::Triplet<double>> trip_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
  int analyzed_J_ = -1;
};

/// Convenience one-shot step.
inline std::pair<TriodState, StepSolution> solve_step(const TriodState& t, double dt) {
  TriodStepper stepper;
  return stepper.step(t, dt);
}

enum class FlowStatus { ReachedT, SteadyState, Singularity, NumericFailure };

inline const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::ReachedT: return "reached_T";
    case FlowStatus::SteadyState: return "steady_state";
    case FlowStatus::Singularity: return "singularity";
    case FlowStatus::NumericFailure: return "numeric_failure";
  }
  return "unknown";
}

struct SeriesRow {
  double t = 0.0;
  double total_length = 0.0;
  std::array<double, 3> length{};
  std::array<double, 3> mu{};
  double dissipation = 0.0;
  double angle_defect = 0.0;
  double junction_z_spread = 0.0;
};

struct FlowOutcome {
  FlowStatus status = FlowStatus::ReachedT;
  TriodState final_state;
  std::vector<SeriesRow> series;
  std::optional<int> vanished_curve;  // 0-based
  std::string message;
};

struct FlowParams {
  double dt = 1e-4;
  double T = 1.0;
  // curve-vanishing threshold; <= 0 selects 1e-2 * (initial shortest length)
  double eps_sing = 0.0;
  // steady state when the largest node displacement per step drops below
  // eps_steady * dt; <= 0 disables the steady stop
  double eps_steady = 1e-6;
};

using StepCallback =
    std::function<void(int step, const TriodState&, const StepSolution&)>;

inline SeriesRow make_series_row(const TriodState& s) {
  SeriesRow row;
  row.t = s.time();
  for (int a = 0; a < 3; ++a) row.length[a] = s.curve_length(a);
  row.total_length = row.length[0] + row.length[1] + row.length[2];
  row.angle_defect = junction_angle_defect(s);
  row.junction_z_spread = lift_triod(s).junction_z_spread;
  return row;
}

inline FlowOutcome run_flow(const TriodState& initial, const FlowParams& params,
                            const StepCallback& on_step = {}) {
  FlowOutcome out;
  TriodState state = initial;
  const auto validation = validate_triod(state);
  if (!validation.ok()) {
    out.status = FlowStatus::NumericFailure;
    out.message = "invalid initial triod: " + validation.violations.front();
    out.final_state = state;
    return out;
  }
  double eps_sing = params.eps_sing;
  if (eps_sing <= 0.0) {
    eps_sing = 1e-2 * std::min({state.curve_length(0), state.curve_length(1),
                                state.curve_length(2)});
  }
  const long long steps = std::max(1LL, std::llround(params.T / params.dt));
  out.series.reserve(static_cast<std::size_t>(steps) + 1);
  out.series.push_back(make_series_row(state));

  TriodStepper stepper;
  const int J = state.segment_count();
  const double h = 1.0 / J;
  out.status = FlowStatus::ReachedT;
  for (long long m = 1; m <= steps; ++m) {
    StepSolution sol;
    try {
      auto [next, s] = stepper.step(state, params.dt);
      state = std::move(next);
      sol = std::move(s);
    } catch (const FlowError& err) {
      out.status = FlowStatus::NumericFailure;
      std::ostringstream os;
      os << "step " << m << " (t=" << m * params.dt << "): " << err.what();
      out.message = os.str();
      break;
    }
    state.set_time(m * params.dt);
    SeriesRow row = make_series_row(state);
    row.mu = sol.mu;
    row.dissipation = sol.report.dissipation;
    out.series.push_back(row);
    if (on_step) on_step(static_cast<int>(m), state, sol);

    const int shortest =
        static_cast<int>(std::min_element(row.length.begin(), row.length.end()) -
                         row.length.begin());
    if (row.length[shortest] < eps_sing) {
      out.status = FlowStatus::Singularity;
      out.vanished_curve = shortest;
      break;
    }
    if (params.eps_steady > 0.0 &&
        sol.max_displacement() < params.eps_steady * params.dt) {
      out.status = FlowStatus::SteadyState;
      break;
    }
    bool degenerate = false;
    for (int a = 0; a < 3 && !degenerate; ++a) {
      const double floor = 1e-3 * h * row.length[a];
      for (int j = 1; j <= J; ++j)
        if (norm(state.node(a, j) - state.node(a, j - 1)) < floor) {
          degenerate = true;
          break;
        }
    }
    if (degenerate) {
      out.status = FlowStatus::NumericFailure;
      std::ostringstream os;
      os << "mesh degeneracy at t=" << state.time();
      out.message = os.str();
      break;
    }
  }
  out.final_state = std::move(state);
  return out;
}

// ---------------------------------------------------------------------------
// single-curve specialization: one open curve, both endpoints pinned, one
// scalar multiplier fixed by a vanishing mass-lumped flux.

struct SingleStepResult {
  PlanarPolyline curve;
  std::vector<double> kappa;
  double mu = 0.0;
  StepReport report;
  double max_displacement = 0.0;
};

class SingleCurveStepper {
 public:
  SingleStepResult step(const PlanarPolyline& c, double dt) {
    const int J = c.segment_count();
    if (J < 2) throw FlowError("single_curve_step: need at least 2 segments");
    if (!(dt > 0.0)) throw FlowError("single_curve_step: dt must be positive");
    const auto gm = detail::CurveGeom::build(J, [&](int j) { return c.nodes[j]; });
    const int ndc = 2 * (J - 1);
    auto dc_ix = [&](int j, int r) {
      return (j >= 1 && j <= J - 1) ? 2 * (j - 1) + r : -1;
    };

    trip_.clear();
    trip_.reserve(12 * J);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ndc);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(ndc);
    for (int i = 1; i <= J - 1; ++i) {
      const int ix = dc_ix(i, 0);
      const Vec2 v = gm.avg_normal(i, J);
      const double s = 1.0 / (dt * gm.w[i]);
      trip_.emplace_back(ix, ix, s * v.x * v.x);
      trip_.emplace_back(ix, ix + 1, s * v.x * v.y);
      trip_.emplace_back(ix + 1, ix, s * v.y * v.x);
      trip_.emplace_back(ix + 1, ix + 1, s * v.y * v.y);
      g[ix] = v.x;
      g[ix + 1] = v.y;
    }
    for (int s = 1; s <= J; ++s) {
      const double inv = 1.0 / gm.len[s];
      const int il = dc_ix(s - 1, 0), ir = dc_ix(s, 0);
      const Vec2 d = c.nodes[s] - c.nodes[s - 1];
      for (int r = 0; r < 2; ++r) {
        const double dr = r == 0 ? d.x : d.y;
        if (il >= 0) {
          trip_.emplace_back(il + r, il + r, inv);
          b[il + r] += dr * inv;
        }
        if (ir >= 0) {
          trip_.emplace_back(ir + r, ir + r, inv);
          b[ir + r] -= dr * inv;
        }
        if (il >= 0 && ir >= 0) {
          trip_.emplace_back(il + r, ir + r, -inv);
          trip_.emplace_back(ir + r, il + r, -inv);
        }
      }
    }
    Eigen::SparseMatrix<double> K(ndc, ndc);
    K.setFromTriplets(trip_.begin(), trip_.end());
    if (!analyzed_ || analyzed_J_ != J) {
      ldlt_.analyzePattern(K);
      analyzed_ = true;
      analyzed_J_ = J;
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success)
      throw SingularSystemError(0, "singular single-curve step system");
    const Eigen::VectorXd zb = ldlt_.solve(b);
    const Eigen::VectorXd zg = ldlt_.solve(g);
    const double schur = g.dot(zg);
    if (!(std::abs(schur) > 0.0))
      throw SingularSystemError(0, "single-curve solvability condition fails");
    double mu = g.dot(zb) / schur;
    Eigen::VectorXd x = zb - mu * zg;
    {
      const Eigen::VectorXd rb = b - K * x - mu * g;
      const Eigen::VectorXd zr = ldlt_.solve(rb);
      const double dmu = (g.dot(zr) + g.dot(x)) / schur;
      x += zr - dmu * zg;
      mu += dmu;
    }

    SingleStepResult out;
    {
      const Eigen::VectorXd rb = b - K * x - mu * g;
      out.report.linear_residual =
          std::max(rb.lpNorm<Eigen::Infinity>(), std::abs(g.dot(x))) /
          (1.0 + b.lpNorm<Eigen::Infinity>());
    }
    out.mu = mu;
    out.kappa.assign(J + 1, 0.0);
    out.curve = c;
    for (int j = 0; j <= J; ++j) {
      Vec2 d{};
      const int ix = dc_ix(j, 0);
      if (ix >= 0) {
        d = {x[ix], x[ix + 1]};
        out.curve.nodes[j] = c.nodes[j] + d;
        out.max_displacement = std::max(out.max_displacement, norm(d));
      }
      out.kappa[j] = mu + dot(d, gm.avg_normal(j, J)) / (dt * gm.w[j]);
    }
    out.report.energy_before = polyline_length(c);
    out.report.energy_after = polyline_length(out.curve);
    double diss = 0.0, flux = 0.0;
    for (int j = 0; j <= J; ++j) {
      const double q = out.kappa[j] - out.mu;
      diss += gm.w[j] * q * q;
      flux += gm.w[j] * q;
    }
    out.report.dissipation = dt * diss;
    out.report.residual_fdc = std::abs(flux);
    const double slack = out.report.energy_before +
                         1e-10 * (1.0 + out.report.energy_before) -
                         out.report.energy_after - out.report.dissipation;
    if (slack < 0.0)
      throw StabilityViolationError("single-curve energy inequality violated");
    return out;
  }

 private:
  std::vector<Eigen::Triplet<double>> trip_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
  int analyzed_J_ = -1;
};

inline SingleStepResult single_curve_step(const PlanarPolyline& c, double dt) {
  SingleCurveStepper stepper;
  return stepper.step(c, dt);
}

}  // namespace heistriod
