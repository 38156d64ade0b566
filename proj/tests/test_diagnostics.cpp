#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "heistriod/diagnostics.hpp"
#include "heistriod/flow.hpp"
#include "heistriod/geodesics.hpp"
#include "heistriod/lifting.hpp"

using namespace heistriod;
namespace {

constexpr double kPi = std::numbers::pi;

PlanarPolyline straight(Vec2 a, Vec2 b, int J) {
  PlanarPolyline c;
  for (int j = 0; j <= J; ++j) c.nodes.push_back(a + (double(j) / J) * (b - a));
  return c;
}

TriodState planar_line_triod(const std::array<Vec2, 3>& ends, int J) {
  std::array<PlanarPolyline, 3> curves;
  for (int a = 0; a < 3; ++a) curves[a] = straight({0, 0}, ends[a], J);
  return TriodState::from_curves(curves, {0.0, 0.0, 0.0});
}

TriodState stationary_arc_triod(int J) {
  std::array<PlanarPolyline, 3> curves;
  std::array<double, 3> z{};
  curves[0] = straight({0, 0}, {1, 0}, J);
  for (int idx : {1, 2}) {
    const double lam = idx == 1 ? kPi : -kPi;
    const double a0 = idx == 1 ? 2.0 * kPi / 3.0 : -2.0 * kPi / 3.0;
    PlanarPolyline c;
    for (int j = 0; j <= J; ++j)
      c.nodes.push_back(arc_geodesic_point(HPoint{}, lam, a0, double(j) / J).planar());
    curves[idx] = c;
    z[idx] = arc_geodesic_point(HPoint{}, lam, a0, 1.0).z;
  }
  return TriodState::from_curves(curves, z);
}

}  // namespace

TEST_CASE("junction angle defect") {
  SECTION("120-degree spokes have zero defect") {
    const TriodState t = planar_line_triod(
        {Vec2{-2, 0}, Vec2{1, -std::sqrt(3.0)}, Vec2{1, std::sqrt(3.0)}}, 40);
    CHECK(junction_angle_defect(t) < 1e-14);
  }

  SECTION("obtuse straight-line data") {
    const TriodState t =
        planar_line_triod({Vec2{-0.5, 0}, Vec2{1, -3}, Vec2{1, 3}}, 40);
    CHECK(std::abs(junction_angle_defect(t) - (1.0 - 2.0 / std::sqrt(10.0))) < 1e-13);
    CHECK(std::abs(junction_angle_defect(t) - 0.3675) < 1e-4);
  }

  SECTION("three aligned tangents saturate at three") {
    const TriodState t =
        planar_line_triod({Vec2{1, 0}, Vec2{2, 0}, Vec2{3, 0}}, 10);
    CHECK(std::abs(junction_angle_defect(t) - 3.0) < 1e-14);
  }

  SECTION("invariant under rigid motions") {
    const TriodState t =
        planar_line_triod({Vec2{-0.5, 0}, Vec2{1, -3}, Vec2{1, 3}}, 12);
    const double d0 = junction_angle_defect(t);
    std::array<PlanarPolyline, 3> curves;
    for (int a = 0; a < 3; ++a) {
      curves[a] = t.curve(a);
      for (Vec2& p : curves[a].nodes) p = rotate(p, 1.1) + Vec2{5, -2};
    }
    const TriodState moved = TriodState::from_curves(curves, {0, 0, 0});
    CHECK(std::abs(junction_angle_defect(moved) - d0) < 1e-13);
  }
}

TEST_CASE("multiplier correspondence") {
  CHECK(multiplier_to_lambda({0, 0, 0}) == std::pair{0.0, 0.0});
  const auto [l1, l2] = multiplier_to_lambda({-1, -1, 2});
  CHECK(l1 == 1.0);
  CHECK(l2 == 2.0);
  CHECK(std::abs((-1.0) - (l1 - l2)) < 1e-15);  // mu_2 = lambda_1 - lambda_2
  CHECK_THROWS_AS(multiplier_to_lambda({1.0, 0.0, 0.0}), std::invalid_argument);

  SECTION("round trip on the zero-sum plane") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
      const double a = u(rng), b = u(rng);
      const std::array<double, 3> mu{a, b, -a - b};
      const auto [x1, x2] = multiplier_to_lambda(mu);
      CHECK(std::abs(-x1 - mu[0]) < 1e-15);
      CHECK(std::abs((x1 - x2) - mu[1]) < 1e-14);
      CHECK(std::abs(x2 - mu[2]) < 1e-15);
    }
  }
}

TEST_CASE("multipliers solve the length-weighted junction system") {
  const TriodState t =
      planar_line_triod({Vec2{-0.5, 0}, Vec2{1, -3}, Vec2{1, 3}}, 60);
  const auto [next, sol] = solve_step(t, 1e-4);
  const auto [l1, l2] = multiplier_to_lambda(sol.mu);
  const int J = t.segment_count();
  std::array<double, 3> L{}, Ik{};
  for (int a = 0; a < 3; ++a) {
    const auto g = detail::CurveGeom::build(J, [&](int j) { return t.node(a, j); });
    L[a] = g.total;
    for (int j = 0; j <= J; ++j) Ik[a] += g.w[j] * sol.kappa[a][j];
  }
  const double r1 = (L[0] + L[1]) * l1 - L[1] * l2 - (Ik[1] - Ik[0]);
  const double r2 = -L[1] * l1 + (L[2] + L[1]) * l2 - (Ik[2] - Ik[1]);
  CHECK(std::abs(r1) < 1e-8);
  CHECK(std::abs(r2) < 1e-8);
}

TEST_CASE("lifted triod reconstruction") {
  SECTION("exactly horizontal data has no junction spread") {
    const TriodState t = planar_line_triod(
        {Vec2{-2, 0}, Vec2{1, -std::sqrt(3.0)}, Vec2{1, std::sqrt(3.0)}}, 30);
    const LiftedTriod lift = lift_triod(t);
    CHECK(lift.junction_z_spread < 1e-14);
    for (int a = 0; a < 3; ++a) {
      CHECK(lift.curves[a].nodes.back().z == t.endpoint_z(a));
      double m = 0.0;
      for (double r : horizontality_residual(lift.curves[a]))
        m = std::max(m, std::abs(r));
      CHECK(m == 0.0);
    }
  }

  SECTION("perturbing one curve shows up as junction spread") {
    TriodState t = planar_line_triod(
        {Vec2{-2, 0}, Vec2{1, -std::sqrt(3.0)}, Vec2{1, std::sqrt(3.0)}}, 30);
    t.set_node(1, 5, t.node(1, 5) + Vec2{0.0, 0.1});
    CHECK(lift_triod(t).junction_z_spread > 1e-4);
  }
}

TEST_CASE("curvature statistics near the arc steady state") {
  const auto r32 = solve_step(stationary_arc_triod(32), 1e-5);
  const auto r64 = solve_step(stationary_arc_triod(64), 1e-5);
  const CurvatureStats s32 = curvature_stats(r32.second, stationary_arc_triod(32));
  const CurvatureStats s64 = curvature_stats(r64.second, stationary_arc_triod(64));

  CHECK(std::abs(s64.means[0]) < 1e-2);
  CHECK(std::abs(std::abs(s64.means[1]) - kPi) < 2e-2);
  CHECK(std::abs(std::abs(s64.means[2]) - kPi) < 2e-2);
  CHECK(s64.means[1] * s64.means[2] < 0.0);  // opposite arcs
  CHECK(std::abs(s64.sum) < 1e-2);

  CHECK(s64.stddevs[1] < 0.1);
  CHECK(s64.stddevs[1] < s32.stddevs[1]);  // first order in h
}

TEST_CASE("energy series rejects fabricated increases") {
  FlowOutcome out;
  out.series.resize(3);
  out.series[0].total_length = 5.0;
  out.series[1].total_length = 4.0;
  out.series[2].total_length = 4.5;
  out.series[2].t = 0.2;
  CHECK_THROWS_AS(energy_series(out), std::runtime_error);
}
