#pragma once

// Discrete function-space machinery on the uniform grid u_j = j/J:
// mass-lumped quadrature with one-sided nodal limits, per-segment frames,
// discrete length, and the triod container. The junction is a single stored
// value referenced by all three curves, so junction coincidence can never
// drift.

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heistriod/geometry.hpp"

namespace heistriod {

/// Mass-lumped quadrature over [0,1]: (h/2) sum_j [chi(u_j^-) + chi(u_{j-1}^+)]
/// for a piecewise-continuous integrand with possible jumps at the nodes.
/// `left[j]` holds chi(u_j^-) and `right[j]` holds chi(u_j^+); left[0] and
/// right[J] never enter the sum.
inline double mass_lumped_integral(std::span<const double> left,
                                   std::span<const double> right) {
  if (left.size() != right.size() || left.size() < 2)
    throw std::invalid_argument("mass_lumped_integral: size mismatch");
  const std::size_t J = left.size() - 1;
  const double h = 1.0 / double(J);
  double sum = 0.0;
  for (std::size_t j = 1; j <= J; ++j) sum += left[j] + right[j - 1];
  return 0.5 * h * sum;
}

inline double polyline_length(const PlanarPolyline& c) {
  double len = 0.0;
  for (std::size_t j = 1; j < c.nodes.size(); ++j)
    len += norm(c.nodes[j] - c.nodes[j - 1]);
  return len;
}

struct SegmentFrame {
  Vec2 tangent;  // unit
  Vec2 normal;   // tangent rotated +90 degrees
  double length = 0.0;
};

inline std::vector<SegmentFrame> segment_frames(const PlanarPolyline& c) {
  if (c.nodes.size() < 2)
    throw std::invalid_argument("segment_frames: need at least 2 nodes");
  std::vector<SegmentFrame> frames(c.nodes.size() - 1);
  for (std::size_t j = 1; j < c.nodes.size(); ++j) {
    const Vec2 d = c.nodes[j] - c.nodes[j - 1];
    const double len = norm(d);
    if (len <= 0.0) {
      std::ostringstream os;
      os << "segment_frames: zero-length segment " << j;
      throw std::invalid_argument(os.str());
    }
    const Vec2 t = (1.0 / len) * d;
    frames[j - 1] = {t, perp(t), len};
  }
  return frames;
}

/// Three planar curves of J segments each sharing the junction node at u=0,
/// with the far nodes pinned; carries the 3d anchors needed to lift.
class TriodState {
 public:
  TriodState() = default;

  /// Build from three full polylines; their first nodes must coincide
  /// bitwise (they become the one shared junction value).
  static TriodState from_curves(const std::array<PlanarPolyline, 3>& curves,
                                const std::array<double, 3>& endpoint_z,
                                double time = 0.0) {
    TriodState t;
    const std::size_t n = curves[0].nodes.size();
    if (n < 2) throw std::invalid_argument("TriodState: curves need >= 2 nodes");
    for (int a = 1; a < 3; ++a) {
      if (curves[a].nodes.size() != n)
        throw std::invalid_argument("TriodState: all curves must share one J");
      if (curves[a].nodes[0].x != curves[0].nodes[0].x ||
          curves[a].nodes[0].y != curves[0].nodes[0].y)
        throw std::invalid_argument("TriodState: junction nodes do not coincide");
    }
    t.junction_ = curves[0].nodes[0];
    for (int a = 0; a < 3; ++a)
      t.tail_[a].assign(curves[a].nodes.begin() + 1, curves[a].nodes.end());
    t.endpoint_z_ = endpoint_z;
    t.time_ = time;
    return t;
  }

  int segment_count() const { return static_cast<int>(tail_[0].size()); }

  Vec2 junction() const { return junction_; }
  void set_junction(Vec2 p) { junction_ = p; }

  Vec2 node(int alpha, int j) const {
    return j == 0 ? junction_ : tail_[alpha][j - 1];
  }
  void set_node(int alpha, int j, Vec2 p) {
    if (j == 0)
      junction_ = p;
    else
      tail_[alpha][j - 1] = p;
  }

  Vec2 endpoint(int alpha) const { return tail_[alpha].back(); }
  double endpoint_z(int alpha) const { return endpoint_z_[alpha]; }
  void set_endpoint_z(int alpha, double z) { endpoint_z_[alpha] = z; }
  HPoint endpoint3d(int alpha) const {
    return make_hpoint(endpoint(alpha), endpoint_z_[alpha]);
  }

  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  PlanarPolyline curve(int alpha) const {
    PlanarPolyline c;
    c.nodes.reserve(tail_[alpha].size() + 1);
    c.nodes.push_back(junction_);
    c.nodes.insert(c.nodes.end(), tail_[alpha].begin(), tail_[alpha].end());
    return c;
  }

  double curve_length(int alpha) const { return polyline_length(curve(alpha)); }
  double total_length() const {
    return curve_length(0) + curve_length(1) + curve_length(2);
  }

 private:
  Vec2 junction_{};
  std::array<std::vector<Vec2>, 3> tail_{};  // nodes 1..J per curve
  std::array<double, 3> endpoint_z_{};
  double time_ = 0.0;
};

struct TriodValidation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline TriodValidation validate_triod(const TriodState& t) {
  TriodValidation v;
  const int J = t.segment_count();
  if (J < 2) {
    v.violations.push_back("fewer than 2 segments per curve");
    return v;
  }
  for (int a = 0; a < 3; ++a) {
    for (int j = 1; j <= J; ++j) {
      const Vec2 d = t.node(a, j) - t.node(a, j - 1);
      if (!(norm(d) > 0.0)) {
        std::ostringstream os;
        os << "curve " << (a + 1) << ": segment " << j << " has zero length";
        v.violations.push_back(os.str());
      }
    }
    if (!std::isfinite(t.endpoint_z(a)))
      v.violations.push_back("non-finite endpoint z");
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const HPoint pa = t.endpoint3d(a), pb = t.endpoint3d(b);
      if (pa.x == pb.x && pa.y == pb.y && pa.z == pb.z) {
        std::ostringstream os;
        os << "endpoints " << (a + 1) << " and " << (b + 1) << " coincide";
        v.violations.push_back(os.str());
      }
    }
  return v;
}

/// Per-segment frames for one triod curve.
inline std::vector<SegmentFrame> triod_frames(const TriodState& t, int alpha) {
  return segment_frames(t.curve(alpha));
}

}  // namespace heistriod
