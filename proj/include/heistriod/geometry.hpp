#pragma once

// Heisenberg-group primitives: the group law on R^3, left translation,
// horizontality of polygonal curves, the oriented-area functional and
// horizontal lifts. The discrete conventions are chosen so that lifting,
// the per-segment horizontality residual and the area functional are
// mutually exact on piecewise-affine curves.

#include <cmath>
#include <cstddef>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace heistriod {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using PlanarPoint = Vec2;

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Rotation by +90 degrees, (x,y) -> (-y,x).
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// A point of R^3 read as an element of the Heisenberg group.
struct HPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec2 planar() const { return {x, y}; }
};

inline HPoint make_hpoint(Vec2 p, double z) { return {p.x, p.y, z}; }

/// Group law: (p ∘ q)_z picks up the symplectic twist (p_x q_y - p_y q_x)/2.
inline HPoint group_compose(const HPoint& p, const HPoint& q) {
  return {p.x + q.x, p.y + q.y,
          p.z + q.z + 0.5 * (p.x * q.y - p.y * q.x)};
}

/// Group inverse; the twist cancels by antisymmetry, so it is -p.
inline HPoint group_inverse(const HPoint& p) { return {-p.x, -p.y, -p.z}; }

inline HPoint left_translate(const HPoint& a, const HPoint& p) {
  return group_compose(a, p);
}

/// Uniform-grid polygonal curve in the plane, nodes at u_j = j/J.
struct PlanarPolyline {
  std::vector<Vec2> nodes;

  int segment_count() const { return static_cast<int>(nodes.size()) - 1; }
};

/// Polygonal curve in the Heisenberg group, nodes at u_j = j/J.
struct HPolyline {
  std::vector<HPoint> nodes;

  int segment_count() const { return static_cast<int>(nodes.size()) - 1; }

  PlanarPolyline planar() const {
    PlanarPolyline c;
    c.nodes.reserve(nodes.size());
    for (const HPoint& p : nodes) c.nodes.push_back(p.planar());
    return c;
  }
};

inline HPolyline left_translate(const HPoint& a, const HPolyline& curve) {
  HPolyline out;
  out.nodes.reserve(curve.nodes.size());
  for (const HPoint& p : curve.nodes) out.nodes.push_back(group_compose(a, p));
  return out;
}

// On an affine segment the horizontality integrand (x y' - y x')/2 is
// constant; its exact integral over segment j is cross(c_{j-1}, c_j)/2.
// That makes the residual below, the lift and the area functional agree
// without any quadrature error.
inline double segment_area_increment(Vec2 a, Vec2 b) { return 0.5 * cross(a, b); }

/// Per-segment defect between the z-increment and the exact integral of the
/// horizontality integrand; identically zero for lifted curves.
inline std::vector<double> horizontality_residual(const HPolyline& curve) {
  if (curve.nodes.size() < 2)
    throw std::invalid_argument("horizontality_residual: need at least 2 nodes");
  std::vector<double> r(curve.nodes.size() - 1);
  for (std::size_t j = 1; j < curve.nodes.size(); ++j) {
    const HPoint& a = curve.nodes[j - 1];
    const HPoint& b = curve.nodes[j];
    r[j - 1] = (b.z - a.z) - segment_area_increment(a.planar(), b.planar());
  }
  return r;
}

inline double max_node_magnitude(const HPolyline& curve) {
  double m = 0.0;
  for (const HPoint& p : curve.nodes)
    m = std::max({m, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
  return m;
}

inline bool is_horizontal(const HPolyline& curve) {
  const double tol = 1e-10 * (1.0 + max_node_magnitude(curve));
  for (double r : horizontality_residual(curve))
    if (std::abs(r) > tol) return false;
  return true;
}

/// Oriented area swept by the radius vector of c (shoelace sum); this is the
/// exact value of the area functional on the piecewise-affine interpolant and
/// equals the z-gain of any horizontal lift of c.
inline double oriented_area(const PlanarPolyline& c) {
  double g = 0.0;
  for (std::size_t j = 1; j < c.nodes.size(); ++j)
    g += segment_area_increment(c.nodes[j - 1], c.nodes[j]);
  return g;
}

struct LiftAnchor {
  enum class End { Start, End };
  End end = End::Start;
  double z = 0.0;

  static LiftAnchor at_start(double z0) { return {End::Start, z0}; }
  static LiftAnchor at_end(double z1) { return {End::End, z1}; }
};

/// Horizontal lift of a planar polyline: z accumulates the per-segment area
/// increments, forward from the start anchor or backward from the end anchor.
inline HPolyline horizontal_lift(const PlanarPolyline& c, LiftAnchor anchor) {
  const std::size_t n = c.nodes.size();
  if (n < 2) throw std::invalid_argument("horizontal_lift: need at least 2 nodes");
  std::vector<double> z(n);
  if (anchor.end == LiftAnchor::End::Start) {
    z[0] = anchor.z;
    for (std::size_t j = 1; j < n; ++j)
      z[j] = z[j - 1] + segment_area_increment(c.nodes[j - 1], c.nodes[j]);
  } else {
    z[n - 1] = anchor.z;
    for (std::size_t j = n - 1; j > 0; --j)
      z[j - 1] = z[j] - segment_area_increment(c.nodes[j - 1], c.nodes[j]);
  }
  HPolyline out;
  out.nodes.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.nodes.push_back(make_hpoint(c.nodes[j], z[j]));
  return out;
}

/// Sub-Riemannian length of a horizontal curve: the Euclidean length of its
/// planar projection. Warns if the curve is visibly non-horizontal, in which
/// case the value is not a length in the group metric.
inline double sub_riemannian_length(const HPolyline& curve) {
  if (!is_horizontal(curve))
    std::cerr << "heistriod: sub_riemannian_length called on a non-horizontal curve\n";
  double len = 0.0;
  for (std::size_t j = 1; j < curve.nodes.size(); ++j)
    len += norm(curve.nodes[j].planar() - curve.nodes[j - 1].planar());
  return len;
}

}  // namespace heistriod
