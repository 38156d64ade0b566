#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "heistriod/discrete.hpp"

using namespace heistriod;
namespace {

constexpr double kPi = std::numbers::pi;

PlanarPolyline straight(Vec2 a, Vec2 b, int J) {
  PlanarPolyline c;
  for (int j = 0; j <= J; ++j) c.nodes.push_back(a + (double(j) / J) * (b - a));
  return c;
}

TriodState steiner_triod(int J) {
  const std::array<Vec2, 3> ends{Vec2{-2, 0}, Vec2{1, -std::sqrt(3.0)},
                                 Vec2{1, std::sqrt(3.0)}};
  std::array<PlanarPolyline, 3> curves;
  for (int a = 0; a < 3; ++a) curves[a] = straight({0, 0}, ends[a], J);
  return TriodState::from_curves(curves, {0.0, 0.0, 0.0});
}

}  // namespace

TEST_CASE("mass-lumped quadrature") {
  const int J = 7;
  std::vector<double> left(J + 1), right(J + 1);

  SECTION("exact on constants") {
    std::fill(left.begin(), left.end(), 1.0);
    std::fill(right.begin(), right.end(), 1.0);
    CHECK(std::abs(mass_lumped_integral(left, right) - 1.0) < 1e-15);
  }

  SECTION("coincides with the trapezoid rule on continuous affine data") {
    for (int j = 0; j <= J; ++j) left[j] = right[j] = double(j) / J;
    CHECK(std::abs(mass_lumped_integral(left, right) - 0.5) < 1e-15);
  }

  SECTION("piecewise-constant data integrates to the segment midsum") {
    // segment value s_j carried by left[j] and right[j-1]
    std::vector<double> seg(J + 1);
    double expected = 0.0;
    for (int j = 1; j <= J; ++j) {
      seg[j] = std::sin(1.7 * j);
      expected += seg[j] / J;
    }
    for (int j = 0; j <= J; ++j) {
      left[j] = j >= 1 ? seg[j] : 0.0;
      right[j] = j + 1 <= J ? seg[j + 1] : 0.0;
    }
    CHECK(std::abs(mass_lumped_integral(left, right) - expected) < 1e-15);
  }

  SECTION("linear and monotone") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> l1(J + 1), r1(J + 1), l2(J + 1), r2(J + 1), ls(J + 1),
        rs(J + 1);
    for (int j = 0; j <= J; ++j) {
      l1[j] = u(rng);
      r1[j] = u(rng);
      l2[j] = u(rng);
      r2[j] = u(rng);
      ls[j] = l1[j] + 3.0 * l2[j];
      rs[j] = r1[j] + 3.0 * r2[j];
    }
    CHECK(std::abs(mass_lumped_integral(ls, rs) - mass_lumped_integral(l1, r1) -
                   3.0 * mass_lumped_integral(l2, r2)) < 1e-14);
    CHECK(mass_lumped_integral(l1, r1) >= 0.0);
  }

  SECTION("size mismatch is rejected") {
    std::vector<double> small(J);
    CHECK_THROWS_AS(mass_lumped_integral(left, small), std::invalid_argument);
  }
}

TEST_CASE("discrete length") {
  SECTION("straight segments measure the endpoint distance") {
    for (int J : {2, 5, 31})
      CHECK(std::abs(polyline_length(straight({0.2, -1}, {3.2, 3}, J)) - 5.0) < 1e-13);
  }

  SECTION("the classical three-spoke triod has energy six") {
    const TriodState t = steiner_triod(100);
    CHECK(std::abs(t.total_length() - 6.0) < 1e-13);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(t.curve_length(a) - 2.0) < 1e-13);
  }

  SECTION("inscribed 100-gon") {
    PlanarPolyline c;
    for (int j = 0; j <= 100; ++j) {
      const double a = 2.0 * kPi * j / 100;
      c.nodes.push_back({std::cos(a), std::sin(a)});
    }
    CHECK(std::abs(polyline_length(c) - 6.282152) < 1e-6);
  }

  SECTION("invariant under rigid motions and reversal") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    PlanarPolyline c;
    for (int j = 0; j <= 23; ++j) c.nodes.push_back({u(rng), u(rng)});
    const double len = polyline_length(c);
    const double angle = u(rng);
    const Vec2 shift{u(rng), u(rng)};
    PlanarPolyline moved, reversed;
    for (const Vec2& p : c.nodes) moved.nodes.push_back(rotate(p, angle) + shift);
    reversed.nodes.assign(c.nodes.rbegin(), c.nodes.rend());
    CHECK(std::abs(polyline_length(moved) - len) < 1e-12 * (1.0 + len));
    CHECK(std::abs(polyline_length(reversed) - len) < 1e-12 * (1.0 + len));
  }
}

TEST_CASE("segment frames") {
  SECTION("flat segment") {
    const auto frames = segment_frames(straight({0, 0}, {1, 0}, 1));
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].tangent.x == 1.0);
    CHECK(frames[0].tangent.y == 0.0);
    CHECK(frames[0].normal.x == 0.0);
    CHECK(frames[0].normal.y == 1.0);
    CHECK(frames[0].length == 1.0);
  }

  SECTION("unit frames, orthogonality, rotation equivariance") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PlanarPolyline c;
    for (int j = 0; j <= 15; ++j) c.nodes.push_back({u(rng) + 0.5 * j, u(rng)});
    const auto frames = segment_frames(c);
    for (const auto& f : frames) {
      CHECK(std::abs(norm(f.tangent) - 1.0) < 1e-14);
      CHECK(std::abs(norm(f.normal) - 1.0) < 1e-14);
      CHECK(std::abs(dot(f.tangent, f.normal)) < 1e-14);
    }
    const double angle = 0.83;
    PlanarPolyline rotated;
    for (const Vec2& p : c.nodes) rotated.nodes.push_back(rotate(p, angle));
    const auto rframes = segment_frames(rotated);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const Vec2 rt = rotate(frames[i].tangent, angle);
      CHECK(std::abs(rt.x - rframes[i].tangent.x) < 1e-13);
      CHECK(std::abs(rt.y - rframes[i].tangent.y) < 1e-13);
    }
  }

  SECTION("zero-length segment is a regularity violation") {
    PlanarPolyline c;
    c.nodes = {{0, 0}, {1, 1}, {1, 1}, {2, 0}};
    CHECK_THROWS_AS(segment_frames(c), std::invalid_argument);
  }
}

TEST_CASE("triod container and validation") {
  SECTION("classical data validates") {
    const TriodState t = steiner_triod(20);
    CHECK(validate_triod(t).ok());
  }

  SECTION("junction is one shared value") {
    TriodState t = steiner_triod(10);
    t.set_junction({0.3, -0.1});
    for (int a = 0; a < 3; ++a) {
      CHECK(t.node(a, 0).x == 0.3);
      CHECK(t.node(a, 0).y == -0.1);
    }
    CHECK(validate_triod(t).ok());
  }

  SECTION("mismatched junction nodes are rejected at construction") {
    std::array<PlanarPolyline, 3> curves;
    curves[0] = straight({0, 0}, {1, 0}, 4);
    curves[1] = straight({0, 0}, {0, 1}, 4);
    curves[2] = straight({1e-9, 0}, {-1, 0}, 4);
    CHECK_THROWS_AS(TriodState::from_curves(curves, {0, 0, 0}),
                    std::invalid_argument);
  }

  SECTION("heterogeneous segment counts are rejected") {
    std::array<PlanarPolyline, 3> curves;
    curves[0] = straight({0, 0}, {1, 0}, 4);
    curves[1] = straight({0, 0}, {0, 1}, 5);
    curves[2] = straight({0, 0}, {-1, 0}, 4);
    CHECK_THROWS_AS(TriodState::from_curves(curves, {0, 0, 0}),
                    std::invalid_argument);
  }

  SECTION("collapsed segment is reported") {
    TriodState t = steiner_triod(10);
    t.set_node(1, 3, t.node(1, 2));
    const auto v = validate_triod(t);
    REQUIRE_FALSE(v.ok());
    CHECK(v.violations.front().find("curve 2") != std::string::npos);
  }

  SECTION("coinciding endpoints are reported") {
    std::array<PlanarPolyline, 3> curves;
    curves[0] = straight({0, 0}, {1, 0}, 4);
    curves[1] = straight({0, 0}, {1, 0}, 4);
    curves[2] = straight({0, 0}, {-1, 0}, 4);
    // same planar endpoint is fine as long as the 3d anchors differ
    const TriodState ok = TriodState::from_curves(curves, {0.0, 0.1, 0.0});
    CHECK(validate_triod(ok).ok());
    const TriodState bad = TriodState::from_curves(curves, {0.0, 0.0, 0.0});
    CHECK_FALSE(validate_triod(bad).ok());
  }
}
