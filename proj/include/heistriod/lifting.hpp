#pragma once

// Lifted-triod reconstruction and the junction stationarity defect. The three
// projected curves are lifted backward from their fixed 3d endpoints; for the
// continuous flow the three junction z-values agree identically, so their
// spread measures the constraint drift of a discrete state.

#include <algorithm>
#include <array>
#include <stdexcept>

#include "heistriod/discrete.hpp"
#include "heistriod/geometry.hpp"

namespace heistriod {

struct LiftedTriod {
  std::array<HPolyline, 3> curves;
  double junction_z_spread = 0.0;
};

inline LiftedTriod lift_triod(const TriodState& t) {
  LiftedTriod out;
  double zmin = 0.0, zmax = 0.0;
  for (int a = 0; a < 3; ++a) {
    out.curves[a] = horizontal_lift(t.curve(a), LiftAnchor::at_end(t.endpoint_z(a)));
    const double z0 = out.curves[a].nodes.front().z;
    zmin = a == 0 ? z0 : std::min(zmin, z0);
    zmax = a == 0 ? z0 : std::max(zmax, z0);
  }
  out.junction_z_spread = zmax - zmin;
  return out;
}

/// |sum of the three unit junction tangents|, each oriented away from the
/// junction along the first segment; zero at a 120-degree junction.
inline double junction_angle_defect(const TriodState& t) {
  Vec2 sum{};
  for (int a = 0; a < 3; ++a) {
    const Vec2 d = t.node(a, 1) - t.node(a, 0);
    const double len = norm(d);
    if (!(len > 0.0))
      throw std::invalid_argument("junction_angle_defect: zero first segment");
    sum += (1.0 / len) * d;
  }
  return norm(sum);
}

}  // namespace heistriod
