#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "heistriod/geodesics.hpp"
#include "heistriod/geometry.hpp"

using namespace heistriod;
namespace {

constexpr double kPi = std::numbers::pi;

// circumcenter of three points; the fitted circle for the arc checks
Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  const double ux = ((a.x * a.x + a.y * a.y) * (b.y - c.y) +
                     (b.x * b.x + b.y * b.y) * (c.y - a.y) +
                     (c.x * c.x + c.y * c.y) * (a.y - b.y)) /
                    d;
  const double uy = ((a.x * a.x + a.y * a.y) * (c.x - b.x) +
                     (b.x * b.x + b.y * b.y) * (a.x - c.x) +
                     (c.x * c.x + c.y * c.y) * (b.x - a.x)) /
                    d;
  return {ux, uy};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("analytic arc evaluation") {
  SECTION("reference vertical gap of the 120-degree arc pair") {
    const HPoint end = arc_geodesic_point(HPoint{}, kPi, 2.0 * kPi / 3.0, 1.0);
    CHECK(std::abs(end.z - (-1.0 / (2.0 * kPi))) < 1e-12);
    // explicit parametrization of the same curve
    for (double s : {0.0, 0.25, 0.5, 1.0}) {
      const HPoint p = arc_geodesic_point(HPoint{}, kPi, 2.0 * kPi / 3.0, s);
      const double cx = std::sin(2.0 * kPi / 3.0) / kPi +
                        std::sin(kPi * s - 2.0 * kPi / 3.0) / kPi;
      const double cy = -std::cos(2.0 * kPi / 3.0) / kPi +
                        std::cos(kPi * s - 2.0 * kPi / 3.0) / kPi;
      CHECK(std::abs(p.x - cx) < 1e-14);
      CHECK(std::abs(p.y - cy) < 1e-14);
      CHECK(std::abs(p.z - (std::sin(kPi * s) - kPi * s) / (2.0 * kPi * kPi)) < 1e-14);
    }
    const HPoint mirrored = arc_geodesic_point(HPoint{}, -kPi, -2.0 * kPi / 3.0, 1.0);
    CHECK(std::abs(mirrored.z - 1.0 / (2.0 * kPi)) < 1e-12);
  }

  SECTION("zero multiplier degenerates to the straight line") {
    const HPoint p = arc_geodesic_point(HPoint{}, 0.0, 0.3, 2.0);
    CHECK(std::abs(p.x - 2.0 * std::cos(0.3)) < 1e-14);
    CHECK(std::abs(p.y - 2.0 * std::sin(0.3)) < 1e-14);
    CHECK(p.z == 0.0);
  }
}

TEST_CASE("connecting geodesics: classification examples") {
  SECTION("planar endpoint gives a line") {
    const auto g = geodesic_between(HPoint{}, HPoint{1, 0, 0}, 50);
    CHECK(g.spec.kind == GeodesicKind::Line);
    CHECK(g.spec.lambda == 0.0);
    CHECK(std::abs(g.spec.s_f - 1.0) < 1e-14);
    CHECK(std::abs(geodesic_length(HPoint{}, HPoint{1, 0, 0}) - 1.0) < 1e-14);
  }

  SECTION("line condition with a general base point") {
    const HPoint P{2, 1, 0.3};
    const HPoint Q = group_compose(P, HPoint{0.6, -0.8, 0});
    const auto g = geodesic_between(P, Q, 40);
    CHECK(g.spec.kind == GeodesicKind::Line);
    CHECK(std::abs(g.spec.s_f - 1.0) < 1e-13);
  }

  SECTION("purely vertical displacement gives the circle family") {
    const auto g = geodesic_between(HPoint{}, HPoint{0, 0, 1}, 100);
    CHECK(g.spec.kind == GeodesicKind::VerticalFamily);
    CHECK(std::abs(std::abs(g.spec.lambda) - std::sqrt(kPi)) < 1e-12);
    CHECK(std::abs(1.0 / std::abs(g.spec.lambda) - 0.564190) < 1e-6);
    CHECK(std::abs(g.spec.s_f - 2.0 * std::sqrt(kPi)) < 1e-12);
    CHECK(std::abs(g.spec.s_f - 3.544908) < 1e-6);
    CHECK(g.spec.k_cover != 0);
    CHECK(std::abs(std::abs(g.spec.lambda) * g.spec.s_f - 2.0 * kPi) < 1e-12);
  }

  SECTION("degenerate input is rejected") {
    CHECK_THROWS_AS(geodesic_between(HPoint{1, 2, 3}, HPoint{1, 2, 3}, 10),
                    std::invalid_argument);
  }
}

TEST_CASE("connecting geodesics: oracle closure on random endpoints") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ur(0.1, 3.0), ua(0.0, 2.0 * kPi),
      uh(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double r = ur(rng), phi = ua(rng), h = uh(rng);
    const HPoint Q{r * std::cos(phi), r * std::sin(phi), h};
    const auto g = geodesic_between(HPoint{}, Q, 100);

    CHECK(std::abs(g.curve.nodes.front().x) < 1e-10);
    CHECK(std::abs(g.curve.nodes.front().z) < 1e-10);
    CHECK(std::abs(g.curve.nodes.back().x - Q.x) < 1e-10);
    CHECK(std::abs(g.curve.nodes.back().y - Q.y) < 1e-10);
    CHECK(std::abs(g.curve.nodes.back().z - Q.z) < 1e-10);
    CHECK(max_abs(horizontality_residual(g.curve)) < 1e-12);
    CHECK(std::abs(oriented_area(g.curve.planar()) - Q.z) < 1e-8);

    if (g.spec.kind == GeodesicKind::Arc) {
      const auto& nodes = g.curve.nodes;
      const Vec2 center = circumcenter(nodes.front().planar(),
                                       nodes[nodes.size() / 2].planar(),
                                       nodes.back().planar());
      const double rho = norm(nodes.front().planar() - center);
      for (const auto& p : nodes)
        CHECK(std::abs(norm(p.planar() - center) - rho) < 1e-8 * rho);
      CHECK(std::abs(std::abs(g.spec.lambda) * g.spec.s_f) < 2.0 * kPi);
      // the reported smooth radius is close to the fitted one
      CHECK(std::abs(1.0 / std::abs(g.spec.lambda) - rho) < 1e-3 * rho);
    } else {
      REQUIRE(g.spec.kind == GeodesicKind::Line);
      const Vec2 dir = g.spec.initial_tangent;
      for (const auto& p : g.curve.nodes)
        CHECK(std::abs(cross(dir, p.planar())) < 1e-10 * (1.0 + r));
    }
    // symmetry of the induced distance
    CHECK(std::abs(geodesic_length(HPoint{}, Q) - geodesic_length(Q, HPoint{})) <
          1e-10 * (1.0 + g.spec.s_f));
  }
}

TEST_CASE("arc turn solver is monotone with a global bracket") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ut(-6.0, 6.0);
  double prev_theta = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10000; ++i) {
    const double target = std::pow(10.0, ut(rng)) * (rng() % 2 ? 1.0 : -1.0);
    const double theta = detail::solve_arc_turn(target, 0);
    CHECK(std::abs(theta) < 2.0 * kPi);
    CHECK(std::abs(detail::arc_gap_ratio(theta, 0) - target) <
          1e-9 * (1.0 + std::abs(target)));
  }
  // monotone increase of the gap ratio along a theta sweep
  for (double theta = -6.2; theta < 6.2; theta += 0.05) {
    if (std::abs(theta) < 1e-6) continue;
    const double f = detail::arc_gap_ratio(theta, 0);
    CHECK(f > prev_theta);
    prev_theta = f;
  }
}

TEST_CASE("vertical family: free angle gives congruent curves") {
  const auto a = geodesic_between(HPoint{}, HPoint{0, 0, 1}, 64, 0.0);
  const auto b = geodesic_between(HPoint{}, HPoint{0, 0, 1}, 64, kPi / 2.0);
  CHECK(std::abs(a.spec.s_f - b.spec.s_f) < 1e-13);
  CHECK(std::abs(sub_riemannian_length(a.curve) - sub_riemannian_length(b.curve)) <
        1e-12);
  for (std::size_t i = 0; i < a.curve.nodes.size(); ++i) {
    const Vec2 rotated = rotate(a.curve.nodes[i].planar(), kPi / 2.0);
    CHECK(std::abs(rotated.x - b.curve.nodes[i].x) < 1e-12);
    CHECK(std::abs(rotated.y - b.curve.nodes[i].y) < 1e-12);
    CHECK(std::abs(a.curve.nodes[i].z - b.curve.nodes[i].z) < 1e-12);
  }
}

TEST_CASE("arc spec is independent of the free-angle argument") {
  const HPoint Q{0.8, -0.3, 0.4};
  const auto a = geodesic_between(HPoint{}, Q, 50, 0.0);
  const auto b = geodesic_between(HPoint{}, Q, 50, 1.234);
  CHECK(a.spec.kind == GeodesicKind::Arc);
  CHECK(a.spec.lambda == b.spec.lambda);
  CHECK(a.spec.s_f == b.spec.s_f);
  CHECK(a.spec.alpha0 == b.spec.alpha0);
}

TEST_CASE("example family of connecting curves") {
  SECTION("b = 0 to a planar unit endpoint is the straight segment") {
    const HPolyline g = example_family_curve(HPoint{}, HPoint{1, 0, 0}, 0.0, 20);
    for (int k = 0; k <= 20; ++k) {
      CHECK(std::abs(g.nodes[k].x - k / 20.0) < 1e-14);
      CHECK(std::abs(g.nodes[k].y) < 1e-14);
      CHECK(std::abs(g.nodes[k].z) < 1e-14);
    }
  }

  SECTION("endpoints are independent of the family parameter") {
    const HPoint P{0.5, -0.5, 0.0}, Q{0, 0, -2};
    for (double b : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
      const HPolyline g = example_family_curve(P, Q, b, 64);
      CHECK(std::abs(g.nodes.front().x - P.x) < 1e-12);
      CHECK(std::abs(g.nodes.front().y - P.y) < 1e-12);
      CHECK(std::abs(g.nodes.front().z - P.z) < 1e-12);
      CHECK(std::abs(g.nodes.back().x - Q.x) < 1e-12);
      CHECK(std::abs(g.nodes.back().y - Q.y) < 1e-12);
      CHECK(std::abs(g.nodes.back().z - Q.z) < 1e-12);
    }
  }

  SECTION("sampled family curves are horizontal to discretization order") {
    const HPoint P{0.1, 0.1, 0.0}, Q{-0.5, 0.5 * std::sqrt(3.0), 0.0};
    const HPolyline coarse = example_family_curve(P, Q, 1.0, 50);
    const HPolyline fine = example_family_curve(P, Q, 1.0, 100);
    const double rc = max_abs(horizontality_residual(coarse));
    const double rf = max_abs(horizontality_residual(fine));
    CHECK(rf < rc);
    CHECK(rf < 1e-4);
    // halving the mesh divides the per-segment defect by about eight
    CHECK(rf < 0.25 * rc);
  }

  SECTION("parameter singularity is reported") {
    CHECK_THROWS_AS(example_family_curve(HPoint{}, HPoint{1, 0, 0}, -5.0, 10),
                    std::invalid_argument);
  }

  SECTION("family members are admissible competitors: never shorter") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 30; ++trial) {
      const HPoint Q{u(rng), u(rng), u(rng)};
      if (norm(Q.planar()) < 0.2) continue;
      const double geo = geodesic_length(HPoint{}, Q);
      for (double b : {-1.0, 0.0, 0.7, 2.0}) {
        if (std::abs(5.0 * Q.x + b) < 1e-6) continue;
        const HPolyline fam = example_family_curve(HPoint{}, Q, b, 2000);
        double len = 0.0;
        for (std::size_t i = 1; i < fam.nodes.size(); ++i)
          len += norm(fam.nodes[i].planar() - fam.nodes[i - 1].planar());
        CHECK(geo <= len + 1e-9);
      }
    }
  }
}
