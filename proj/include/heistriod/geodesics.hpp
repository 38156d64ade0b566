#pragma once

// Closed-form horizontal connecting curves between two points of the group:
// straight lines, circular arcs parametrized by a curvature multiplier, and
// the one-parameter vertical family of circle lifts. Used as initial-data
// generators and as steady-state oracles for the flow.

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "heistriod/geometry.hpp"

namespace heistriod {

enum class GeodesicKind { Line, Arc, VerticalFamily };

struct GeodesicSpec {
  GeodesicKind kind = GeodesicKind::Line;
  double lambda = 0.0;       // curvature multiplier, zero for lines
  double s_f = 0.0;          // planar arc length = group length of the lift
  double alpha0 = 0.0;       // initial tangent angle
  Vec2 center{};             // arc/circle center (original frame)
  Vec2 initial_tangent{};    // unit tangent at the start point
  int k_cover = 0;           // winding count, vertical family only
};

struct Geodesic {
  HPolyline curve;
  GeodesicSpec spec;
};

namespace detail {

// Vertical gap over chord-length-squared of a circular arc as a function of
// the signed turning angle theta in (-2pi, 2pi) \ {0}. With segments == 0 it
// is the smooth-arc value (theta - sin theta) / (8 sin^2(theta/2)); with
// segments == J it is the corresponding value for the shoelace area of the
// inscribed J-segment polygon, J sin(theta/J) replacing theta. Both versions
// are odd, strictly increasing, and cover all of R.
inline double arc_gap_series_c2(int segments) {
  const double jm2 = segments > 0 ? 1.0 / (double(segments) * segments) : 0.0;
  return 1.0 / 12.0 - (1.0 + jm2) / 20.0;
}

inline double arc_gap_ratio(double theta, int segments) {
  const double jm2 = segments > 0 ? 1.0 / (double(segments) * segments) : 0.0;
  if (std::abs(theta) < 1e-2) {
    // series around zero; the direct quotient cancels catastrophically there
    const double t2 = theta * theta;
    return theta / 12.0 * (1.0 - jm2) *
           (1.0 + arc_gap_series_c2(segments) * t2 + t2 * t2 / 840.0);
  }
  const double num = segments > 0
                         ? segments * std::sin(theta / segments) - std::sin(theta)
                         : theta - std::sin(theta);
  const double s = std::sin(0.5 * theta);
  return num / (8.0 * s * s);
}

inline double arc_gap_ratio_derivative(double theta, int segments) {
  const double jm2 = segments > 0 ? 1.0 / (double(segments) * segments) : 0.0;
  if (std::abs(theta) < 1e-2) {
    const double t2 = theta * theta;
    return (1.0 - jm2) / 12.0 *
           (1.0 + 3.0 * arc_gap_series_c2(segments) * t2 + 5.0 * t2 * t2 / 840.0);
  }
  const double s = std::sin(0.5 * theta);
  const double d = 8.0 * s * s;
  const double dd = 4.0 * std::sin(theta);
  const double num = segments > 0
                         ? segments * std::sin(theta / segments) - std::sin(theta)
                         : theta - std::sin(theta);
  const double dnum = segments > 0 ? std::cos(theta / segments) - std::cos(theta)
                                   : 1.0 - std::cos(theta);
  return (dnum * d - num * dd) / (d * d);
}

// Solve arc_gap_ratio(theta) = target on (-2pi, 2pi) by bracketed bisection
// with a Newton polish; monotonicity gives a global bracket.
inline double solve_arc_turn(double target, int segments) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (target == 0.0) return 0.0;
  double margin = 1e-2;
  double hi = two_pi - margin;
  while (arc_gap_ratio(hi, segments) < std::abs(target)) {
    margin *= 0.25;
    hi = two_pi - margin;
    if (margin < 1e-280) {
      std::ostringstream os;
      os << "solve_arc_turn: bracket failed, target=" << target
         << " margin=" << margin;
      throw std::runtime_error(os.str());
    }
  }
  double lo = 0.0;
  const double sign = target > 0 ? 1.0 : -1.0;
  const double t = std::abs(target);
  for (int it = 0; it < 200 && hi - lo > 1e-16 * two_pi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (arc_gap_ratio(mid, segments) < t ? lo : hi) = mid;
  }
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const double f = arc_gap_ratio(theta, segments) - t;
    const double df = arc_gap_ratio_derivative(theta, segments);
    if (df <= 0.0) break;
    const double step = f / df;
    const double next = theta - step;
    if (next <= 0.0 || next >= two_pi) break;
    theta = next;
  }
  const double resid = arc_gap_ratio(theta, segments) - t;
  if (std::abs(resid) > 1e-10 * (1.0 + t)) {
    std::ostringstream os;
    os << "solve_arc_turn: no convergence, target=" << target << " theta=" << theta
       << " residual=" << resid << " bracket=[" << lo << "," << hi << "]";
    throw std::runtime_error(os.str());
  }
  return sign * theta;
}

// Center offset and radius of the arc with chord length r and turning angle
// theta; the center sits on the perpendicular bisector of the chord.
inline double arc_center_offset(double r, double theta) {
  return 0.5 * r / std::tan(0.5 * theta);
}
inline double arc_radius(double r, double theta) {
  return 0.5 * r / std::abs(std::sin(0.5 * theta));
}

}  // namespace detail

/// Analytic point of the unit-speed horizontal curve through P whose planar
/// projection has constant signed curvature -lambda and initial tangent angle
/// alpha0; at lambda = 0 it degenerates to the straight horizontal line.
inline HPoint arc_geodesic_point(const HPoint& P, double lambda, double alpha0,
                                 double s) {
  const Vec2 B{std::cos(alpha0), std::sin(alpha0)};
  HPoint local;
  if (lambda == 0.0) {
    local = {s * B.x, s * B.y, 0.0};
  } else {
    const Vec2 A{B.y / lambda, -B.x / lambda};
    const double phase = lambda * s - alpha0;
    local = {A.x + std::sin(phase) / lambda, A.y + std::cos(phase) / lambda,
             (std::sin(lambda * s) - lambda * s) / (2.0 * lambda * lambda)};
  }
  return group_compose(P, local);
}

/// Analytic sampling of the curve above, uniform in arc length.
inline HPolyline sample_arc_geodesic(const HPoint& P, double lambda, double alpha0,
                                     double s_f, int samples) {
  if (samples < 2) throw std::invalid_argument("sample_arc_geodesic: samples < 2");
  HPolyline out;
  out.nodes.reserve(samples + 1);
  for (int k = 0; k <= samples; ++k)
    out.nodes.push_back(arc_geodesic_point(P, lambda, alpha0, s_f * k / samples));
  return out;
}

/// Length-minimizing horizontal polyline from P to Q with `samples` segments,
/// together with the classification of the underlying smooth minimizer.
///
/// The polyline's planar nodes are placed on the exact connecting line or
/// circle, with the circle parameters calibrated against the discrete area
/// functional so that the lifted endpoint closes on Q to round-off for any
/// sample count. The reported spec carries the smooth-curve parameters.
///
/// For coinciding planar projections the minimizer is a one-parameter family
/// of circle lifts; alpha0 selects the member (free initial tangent angle).
inline Geodesic geodesic_between(const HPoint& P, const HPoint& Q, int samples,
                                 double alpha0 = 0.0) {
  constexpr double pi = std::numbers::pi;
  if (samples < 2) throw std::invalid_argument("geodesic_between: samples < 2");
  const HPoint T = group_compose(group_inverse(P), Q);
  const Vec2 d = T.planar();
  const double r = norm(d);
  const double h = T.z;
  const double vertical_tol = 1e-13 * (1.0 + std::sqrt(std::abs(h)));
  if (r <= vertical_tol && std::abs(h) <= 1e-15 * (1.0 + std::abs(P.z) + std::abs(Q.z)))
    throw std::invalid_argument("geodesic_between: degenerate input P = Q");

  GeodesicSpec spec;
  PlanarPolyline c;
  c.nodes.resize(samples + 1);

  if (r <= vertical_tol) {
    // vertical family: k-fold circle lift; we fix |k| = 1
    spec.kind = GeodesicKind::VerticalFamily;
    const double sgn = h > 0 ? 1.0 : -1.0;
    spec.k_cover = h > 0 ? -1 : 1;
    spec.lambda = -sgn * std::sqrt(pi / std::abs(h));
    spec.s_f = 2.0 * pi / std::abs(spec.lambda);
    spec.alpha0 = alpha0;
    spec.initial_tangent = {std::cos(alpha0), std::sin(alpha0)};
    const double rho_c = 1.0 / std::abs(spec.lambda);
    spec.center = P.planar() + sgn * rho_c * perp(spec.initial_tangent);
    // polygon radius chosen so the shoelace area matches the vertical gap
    const double rho_d =
        std::sqrt(2.0 * std::abs(h) / (samples * std::sin(2.0 * pi / samples)));
    const Vec2 center_d = sgn * rho_d * perp(spec.initial_tangent);
    for (int k = 0; k <= samples; ++k)
      c.nodes[k] = center_d + rotate(-center_d, sgn * 2.0 * pi * k / samples);
    c.nodes[samples] = c.nodes[0];
  } else if (std::abs(h) <= 1e-13 * (1.0 + r * r)) {
    spec.kind = GeodesicKind::Line;
    spec.lambda = 0.0;
    spec.s_f = r;
    spec.initial_tangent = (1.0 / r) * d;
    spec.alpha0 = std::atan2(spec.initial_tangent.y, spec.initial_tangent.x);
    for (int k = 0; k <= samples; ++k) c.nodes[k] = (double(k) / samples) * d;
  } else {
    spec.kind = GeodesicKind::Arc;
    const double target = h / (r * r);
    const double theta_c = detail::solve_arc_turn(target, 0);
    const double rho_c = detail::arc_radius(r, theta_c);
    spec.s_f = rho_c * std::abs(theta_c);
    spec.lambda = -theta_c / spec.s_f;
    const Vec2 mid = 0.5 * d;
    const Vec2 pn = (1.0 / r) * perp(d);
    const Vec2 center_c = mid + detail::arc_center_offset(r, theta_c) * pn;
    const double sgn = theta_c > 0 ? 1.0 : -1.0;
    spec.initial_tangent = (sgn / rho_c) * perp(-center_c);
    spec.alpha0 = std::atan2(spec.initial_tangent.y, spec.initial_tangent.x);
    spec.center = P.planar() + center_c;
    // polygon nodes on the discrete-calibrated circle
    const double theta_d = detail::solve_arc_turn(target, samples);
    const Vec2 center_d = mid + detail::arc_center_offset(r, theta_d) * pn;
    for (int k = 0; k <= samples; ++k)
      c.nodes[k] = center_d + rotate(-center_d, theta_d * k / samples);
    c.nodes[samples] = d;
  }
  if (spec.alpha0 < 0.0) spec.alpha0 += 2.0 * pi;

  HPolyline lifted = horizontal_lift(c, LiftAnchor::at_start(0.0));
  Geodesic out;
  out.curve = left_translate(P, lifted);
  out.spec = spec;
  return out;
}

/// Group distance between P and Q, i.e. the length of the minimizer above.
inline double geodesic_length(const HPoint& P, const HPoint& Q) {
  return geodesic_between(P, Q, 2).spec.s_f;
}

/// One-parameter family of horizontal polynomial curves from P to Q; the
/// parameter b selects the member. These are admissible competitors for the
/// connecting problem, not minimizers. Sampled uniformly in the curve
/// parameter; the polyline approximates the exactly horizontal smooth curve.
inline HPolyline example_family_curve(const HPoint& P, const HPoint& Q, double b,
                                      int samples) {
  if (samples < 2) throw std::invalid_argument("example_family_curve: samples < 2");
  const double m1 = Q.x - P.x;
  const double m2 = Q.y - P.y;
  const double m3 = Q.z - P.z - 0.5 * (P.x * (Q.y - P.y) - P.y * (Q.x - P.x));
  const double denom = 5.0 * m1 + b;
  if (std::abs(denom) <= 1e-12 * (1.0 + 5.0 * std::abs(m1) + std::abs(b))) {
    std::ostringstream os;
    os << "example_family_curve: parameter singularity 5*(Q-P).x + b = " << denom
       << "; pick another b";
    throw std::invalid_argument(os.str());
  }
  const double beta = (60.0 * m3 - 10.0 * m1 * m2 + 10.0 * b * m2) / denom;
  const double alpha = m2 - beta;
  const double a = m1 - b;
  HPolyline out;
  out.nodes.reserve(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    const double u = double(k) / samples;
    const double u2 = u * u, u3 = u2 * u;
    const HPoint local{a * u + b * u2, alpha * u2 + beta * u3,
                       alpha * a * u3 / 6.0 + a * beta * u2 * u2 / 4.0 +
                           b * beta * u3 * u2 / 10.0};
    out.nodes.push_back(group_compose(P, local));
  }
  return out;
}

}  // namespace heistriod
