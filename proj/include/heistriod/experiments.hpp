#pragma once

// Config-driven experiment runner: initial-data generators (straight lines,
// junction-compatible cubic Bezier data, the polynomial connecting family,
// sampled geodesics, snapshot restarts), the fifteen built-in presets, and
// the output writers.

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "heistriod/csv.hpp"
#include "heistriod/discrete.hpp"
#include "heistriod/flow.hpp"
#include "heistriod/geodesics.hpp"
#include "heistriod/geometry.hpp"
#include "heistriod/svg.hpp"

namespace heistriod {

enum class InitialKind {
  PlanarLine,
  Line3D,
  BezierCompatible,
  ExampleFamily,
  GeodesicSampled,
  Snapshot,
};

inline const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::PlanarLine: return "planar_line";
    case InitialKind::Line3D: return "line3d";
    case InitialKind::BezierCompatible: return "bezier";
    case InitialKind::ExampleFamily: return "example_family";
    case InitialKind::GeodesicSampled: return "geodesic";
    case InitialKind::Snapshot: return "snapshot";
  }
  return "unknown";
}

/// Shape of one Bezier initial curve: the tangent direction leaving the
/// junction, the handle lengths at the two ends, and optionally the travel
/// direction into the endpoint (defaults to the chord direction).
struct BezierCurveSpec {
  double dir_angle = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  std::optional<double> end_angle;
};

struct ExperimentConfig {
  std::string name = "custom";
  HPoint junction{};
  std::array<Vec2, 3> endpoint_xy{};
  std::array<std::optional<double>, 3> endpoint_z{};  // empty: completed by lift
  InitialKind kind = InitialKind::PlanarLine;
  std::array<BezierCurveSpec, 3> bezier{};
  std::array<double, 3> family_b{};
  double geodesic_alpha0 = 0.0;
  std::string snapshot_path;
  int J = 100;
  std::string dt_text = "1e-4";  // kept verbatim for exact round trips
  double T = 1.0;
  std::optional<double> eps_sing;  // empty: 1e-2 * initial shortest length
  double eps_steady = 1e-6;
  bool out_csv = true;
  bool out_svg = false;
  std::vector<double> snapshot_times;
  int csv_every = 1;

  double dt() const { return std::strtod(dt_text.c_str(), nullptr); }
  void set_dt(const std::string& text) { dt_text = text; }
};

// ---------------------------------------------------------------------------
// initial-data generators

inline PlanarPolyline sample_segment(Vec2 a, Vec2 b, int J) {
  PlanarPolyline c;
  c.nodes.reserve(J + 1);
  for (int j = 0; j <= J; ++j) c.nodes.push_back(a + (double(j) / J) * (b - a));
  return c;
}

inline PlanarPolyline sample_bezier(Vec2 c0, Vec2 c1, Vec2 c2, Vec2 c3, int J) {
  PlanarPolyline c;
  c.nodes.reserve(J + 1);
  for (int j = 0; j <= J; ++j) {
    const double u = double(j) / J, v = 1.0 - u;
    c.nodes.push_back(v * v * v * c0 + 3.0 * v * v * u * c1 + 3.0 * v * u * u * c2 +
                      u * u * u * c3);
  }
  return c;
}

namespace detail {

inline void require_valid(const TriodState& t, const char* what) {
  const auto v = validate_triod(t);
  if (!v.ok())
    throw std::invalid_argument(std::string(what) + ": " + v.violations.front());
}

}  // namespace detail

/// Straight segments from the junction to the endpoints; z anchors come from
/// the lift. When an endpoint z is prescribed it must agree with the lifted
/// value, i.e. the straight 3d segment must itself be horizontal.
inline TriodState make_initial_straight(const HPoint& junction,
                                        const std::array<Vec2, 3>& ends,
                                        const std::array<std::optional<double>, 3>& z,
                                        int J) {
  std::array<PlanarPolyline, 3> curves;
  std::array<double, 3> endpoint_z{};
  for (int a = 0; a < 3; ++a) {
    if (norm(ends[a] - junction.planar()) == 0.0) {
      std::ostringstream os;
      os << "straight initial data: endpoint " << (a + 1)
         << " coincides with the junction";
      throw std::invalid_argument(os.str());
    }
    curves[a] = sample_segment(junction.planar(), ends[a], J);
    const double lifted = junction.z + oriented_area(curves[a]);
    if (z[a] && std::abs(*z[a] - lifted) > 1e-9 * (1.0 + std::abs(*z[a]))) {
      std::ostringstream os;
      os << "straight segment to endpoint " << (a + 1)
         << " is not horizontal: its z-gain is fixed by the planar data to "
         << lifted << ", got " << *z[a];
      throw std::invalid_argument(os.str());
    }
    endpoint_z[a] = lifted;
  }
  TriodState t = TriodState::from_curves(curves, endpoint_z);
  detail::require_valid(t, "straight initial data");
  return t;
}

/// Cubic Bezier curves whose junction tangents sit at mutual 120 degrees;
/// endpoint z anchors are completed by lifting from the junction.
inline TriodState make_initial_bezier(const HPoint& junction,
                                      const std::array<Vec2, 3>& ends,
                                      const std::array<BezierCurveSpec, 3>& spec,
                                      int J) {
  std::array<Vec2, 3> dir;
  for (int a = 0; a < 3; ++a)
    dir[a] = {std::cos(spec[a].dir_angle), std::sin(spec[a].dir_angle)};
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (std::abs(dot(dir[a], dir[b]) + 0.5) > 1e-8) {
        std::ostringstream os;
        os << "bezier initial data: junction directions of curves " << (a + 1)
           << " and " << (b + 1) << " are not at 120 degrees";
        throw std::invalid_argument(os.str());
      }
  std::array<PlanarPolyline, 3> curves;
  std::array<double, 3> endpoint_z{};
  for (int a = 0; a < 3; ++a) {
    const Vec2 chord = ends[a] - junction.planar();
    const double len = norm(chord);
    if (len == 0.0)
      throw std::invalid_argument("bezier initial data: endpoint at the junction");
    const Vec2 into_end =
        spec[a].end_angle
            ? Vec2{std::cos(*spec[a].end_angle), std::sin(*spec[a].end_angle)}
            : (1.0 / len) * chord;
    curves[a] = sample_bezier(junction.planar(), junction.planar() + spec[a].d1 * dir[a],
                              ends[a] - spec[a].d2 * into_end, ends[a], J);
    endpoint_z[a] = junction.z + oriented_area(curves[a]);
  }
  TriodState t = TriodState::from_curves(curves, endpoint_z);
  detail::require_valid(t, "bezier initial data");
  return t;
}

/// Junction-handle length that makes the lifted endpoint z hit `target_z`
/// (relative to the junction z), with the other shape data held fixed.
/// Scans for a sign change, then bisects; used to pin down preset shapes.
inline double calibrate_bezier_handle(const HPoint& junction, Vec2 end,
                                      const BezierCurveSpec& spec, int J,
                                      double target_z, double d1_max = 64.0) {
  const Vec2 dir{std::cos(spec.dir_angle), std::sin(spec.dir_angle)};
  const Vec2 chord = end - junction.planar();
  const double len = norm(chord);
  const Vec2 into_end = spec.end_angle
                            ? Vec2{std::cos(*spec.end_angle), std::sin(*spec.end_angle)}
                            : (1.0 / len) * chord;
  auto gain = [&](double d1) {
    const PlanarPolyline c =
        sample_bezier(junction.planar(), junction.planar() + d1 * dir,
                      end - spec.d2 * into_end, end, J);
    return oriented_area(c) - target_z;
  };
  double lo = 1e-8 * (1.0 + len);
  double flo = gain(lo);
  double hi = lo;
  double fhi = flo;
  for (double step = 0.05 * len; hi < d1_max; step *= 1.5) {
    hi += step;
    fhi = gain(hi);
    if (flo * fhi <= 0.0) break;
    lo = hi;
    flo = fhi;
  }
  if (flo * fhi > 0.0)
    throw std::runtime_error("calibrate_bezier_handle: no bracket up to d1_max");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gain(mid) * flo <= 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = gain(lo);
    }
  }
  return 0.5 * (lo + hi);
}

/// Polynomial connecting-family curves from the junction to full 3d endpoints.
inline TriodState make_initial_family(const HPoint& junction,
                                      const std::array<HPoint, 3>& ends,
                                      const std::array<double, 3>& b, int J) {
  std::array<PlanarPolyline, 3> curves;
  std::array<double, 3> endpoint_z{};
  for (int a = 0; a < 3; ++a) {
    const HPolyline g = example_family_curve(junction, ends[a], b[a], J);
    curves[a] = g.planar();
    curves[a].nodes.front() = junction.planar();  // bitwise shared junction
    curves[a].nodes.back() = ends[a].planar();
    endpoint_z[a] = ends[a].z;
  }
  TriodState t = TriodState::from_curves(curves, endpoint_z);
  detail::require_valid(t, "family initial data");
  return t;
}

/// Length minimizers from the junction to full 3d endpoints.
inline TriodState make_initial_geodesic(const HPoint& junction,
                                        const std::array<HPoint, 3>& ends, int J,
                                        double alpha0) {
  std::array<PlanarPolyline, 3> curves;
  std::array<double, 3> endpoint_z{};
  for (int a = 0; a < 3; ++a) {
    const Geodesic g = geodesic_between(junction, ends[a], J, alpha0);
    curves[a] = g.curve.planar();
    curves[a].nodes.front() = junction.planar();
    endpoint_z[a] = ends[a].z;
  }
  TriodState t = TriodState::from_curves(curves, endpoint_z);
  detail::require_valid(t, "geodesic initial data");
  return t;
}

inline TriodState build_initial(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case InitialKind::PlanarLine:
    case InitialKind::Line3D:
      return make_initial_straight(cfg.junction, cfg.endpoint_xy, cfg.endpoint_z,
                                   cfg.J);
    case InitialKind::BezierCompatible:
      for (int a = 0; a < 3; ++a)
        if (cfg.endpoint_z[a])
          throw std::invalid_argument(
              "bezier initial data: endpoint z is computed by lifting; leave it "
              "unset");
      return make_initial_bezier(cfg.junction, cfg.endpoint_xy, cfg.bezier, cfg.J);
    case InitialKind::ExampleFamily:
    case InitialKind::GeodesicSampled: {
      std::array<HPoint, 3> ends;
      for (int a = 0; a < 3; ++a) {
        if (!cfg.endpoint_z[a])
          throw std::invalid_argument(
              "this initial kind needs full 3d endpoints (z missing)");
        ends[a] = make_hpoint(cfg.endpoint_xy[a], *cfg.endpoint_z[a]);
      }
      return cfg.kind == InitialKind::ExampleFamily
                 ? make_initial_family(cfg.junction, ends, cfg.family_b, cfg.J)
                 : make_initial_geodesic(cfg.junction, ends, cfg.J,
                                         cfg.geodesic_alpha0);
    }
    case InitialKind::Snapshot: {
      const SnapshotData snap = parse_snapshot_csv(read_text_file(cfg.snapshot_path));
      return snap.state;
    }
  }
  throw std::logic_error("build_initial: unhandled kind");
}

// ---------------------------------------------------------------------------
// built-in presets

inline constexpr int kBuiltinExperimentCount = 15;

/// The fifteen built-in experiments. Bezier handle lengths were calibrated
/// once (bisection on the junction handle at J=100, endpoint handle fixed at
/// 0.3 of the chord) so the lifted endpoints reproduce the reference values
/// to three decimals; they are stored frozen.
inline ExperimentConfig builtin_experiment(int id) {
  constexpr double pi = std::numbers::pi;
  const double s3 = std::sqrt(3.0);
  ExperimentConfig cfg;
  char name[16];
  std::snprintf(name, sizeof name, "exp%02d", id);
  cfg.name = name;

  auto planar_lines = [&](Vec2 p1, Vec2 p2, Vec2 p3) {
    cfg.kind = InitialKind::PlanarLine;
    cfg.endpoint_xy = {p1, p2, p3};
    cfg.endpoint_z = {0.0, 0.0, 0.0};
  };
  auto mirror_pair = [&](double dir1, Vec2 p1, Vec2 p2, Vec2 p3, double d1,
                         double d2) {
    cfg.kind = InitialKind::BezierCompatible;
    cfg.endpoint_xy = {p1, p2, p3};
    cfg.endpoint_z = {std::nullopt, std::nullopt, std::nullopt};
    const double chord1 = norm(p1 - cfg.junction.planar());
    cfg.bezier[0] = {dir1, 0.3 * chord1, 0.3 * chord1, {}};
    cfg.bezier[1] = {dir1 + 2.0 * pi / 3.0, d1, d2, {}};
    cfg.bezier[2] = {dir1 - 2.0 * pi / 3.0, d1, d2, {}};
  };

  switch (id) {
    case 1:
      planar_lines({-2, 0}, {1, -s3}, {1, s3});
      cfg.T = 1.0;
      break;
    case 2:
      planar_lines({-0.5, 0}, {1, -3}, {1, 3});
      cfg.T = 5.0;
      break;
    case 3:
      planar_lines({-0.5, 0}, {1, -9}, {1, 9});
      cfg.T = 5.0;
      break;
    case 4:
      // straight lines in R^3; the third z anchor follows from the lift
      cfg.kind = InitialKind::Line3D;
      cfg.junction = {0, 0.1, 0};
      cfg.endpoint_xy = {Vec2{1, 0}, Vec2{0, 0}, Vec2{-0.5, 0.5 * s3}};
      cfg.endpoint_z = {-0.05, 0.0, std::nullopt};
      cfg.T = 0.5;
      break;
    case 5:
      mirror_pair(pi, {-0.5, 0}, {1, -3}, {1, 3}, 1.033121198357,
                  0.3 * std::sqrt(10.0));
      cfg.T = 5.0;
      break;
    case 6:
      mirror_pair(pi, {-0.5, 0}, {1, -9}, {1, 9}, 2.957163473856,
                  0.3 * std::sqrt(82.0));
      cfg.T = 20.0;
      break;
    case 7:
      mirror_pair(0.0, {1, 0}, {1, 0}, {1, 0}, 0.317010805570, 0.3);
      cfg.T = 0.25;
      break;
    case 8:
      cfg.kind = InitialKind::BezierCompatible;
      cfg.junction = {-1, 0, 0};
      cfg.endpoint_xy = {Vec2{0, 0}, Vec2{0, 0}, Vec2{0, 0}};
      cfg.bezier[0] = {0.0, 0.3, 0.3, {}};
      cfg.bezier[1] = {2.0 * pi / 3.0, 0.588734353201, 0.3, {}};
      cfg.bezier[2] = {-2.0 * pi / 3.0, 0.090574515877, 0.3, {}};
      cfg.T = 0.25;
      break;
    case 9:
      cfg.kind = InitialKind::BezierCompatible;
      cfg.junction = {-1, 0, 0};
      cfg.endpoint_xy = {Vec2{0, 0}, Vec2{0, 0}, Vec2{0, 0}};
      cfg.bezier[0] = {0.0, 0.3, 0.3, {}};
      cfg.bezier[1] = {-2.0 * pi / 3.0, 8.831015298016, 0.3, {}};
      cfg.bezier[2] = {2.0 * pi / 3.0, 0.563946845031, 0.5, pi / 3.0};
      cfg.T = 20.0;
      break;
    case 10:
      cfg.kind = InitialKind::BezierCompatible;
      cfg.junction = {-1, 0, 0};
      cfg.endpoint_xy = {Vec2{0, 0}, Vec2{0, 0}, Vec2{0, 0}};
      cfg.bezier[0] = {0.0, 0.3, 0.3, {}};
      cfg.bezier[1] = {-2.0 * pi / 3.0, 8.831015298016, 0.3, {}};
      cfg.bezier[2] = {2.0 * pi / 3.0, 4.709874825608, 0.3, {}};
      cfg.T = 2.0;
      break;
    case 11:
      cfg.kind = InitialKind::BezierCompatible;
      cfg.junction = {-1, 0, 0};
      cfg.endpoint_xy = {Vec2{0, 0}, Vec2{0, 0}, Vec2{0, 0}};
      cfg.bezier[0] = {0.0, 0.3, 0.3, {}};
      cfg.bezier[1] = {-2.0 * pi / 3.0, 8.831015298016, 0.3, {}};
      cfg.bezier[2] = {2.0 * pi / 3.0, 1.766203059603, 0.3, {}};
      cfg.T = 5.0;
      break;
    case 12:
      mirror_pair(pi, {-1, 0}, {1, 0}, {1, 0}, 0.317010805570, 0.3);
      cfg.T = 0.3;
      break;
    case 13:
      cfg.kind = InitialKind::GeodesicSampled;
      cfg.endpoint_xy = {Vec2{0, 0}, Vec2{1, -s3}, Vec2{1, s3}};
      cfg.endpoint_z = {-pi, 0.0, 0.0};
      cfg.T = 7.0;
      break;
    case 14:
      cfg.kind = InitialKind::ExampleFamily;
      cfg.junction = {0.5, -0.5, 0};
      cfg.endpoint_xy = {Vec2{1, 0}, Vec2{0, 0}, Vec2{0, 0}};
      cfg.endpoint_z = {0.0, 0.0, -2.0};
      cfg.family_b = {1.0, 1.0, 1.0};
      cfg.T = 2.0;
      break;
    case 15:
      cfg.kind = InitialKind::ExampleFamily;
      cfg.junction = {0.1, 0.1, 0};
      cfg.endpoint_xy = {Vec2{1, 0}, Vec2{0, 0}, Vec2{-0.5, 0.5 * s3}};
      cfg.endpoint_z = {0.0, 0.0, 0.0};
      cfg.family_b = {0.0, 0.0, 0.0};
      cfg.T = 0.5;
      break;
    default: {
      std::ostringstream os;
      os << "builtin_experiment: id " << id << " out of range 1.."
         << kBuiltinExperimentCount;
      throw std::invalid_argument(os.str());
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// config JSON

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema"] = 1;
  j["name"] = cfg.name;
  j["junction"] = {cfg.junction.x, cfg.junction.y, cfg.junction.z};
  nlohmann::json eps = nlohmann::json::array();
  for (int a = 0; a < 3; ++a) {
    nlohmann::json e = {cfg.endpoint_xy[a].x, cfg.endpoint_xy[a].y};
    if (cfg.endpoint_z[a])
      e.push_back(*cfg.endpoint_z[a]);
    else
      e.push_back(nullptr);
    eps.push_back(e);
  }
  j["endpoints"] = eps;
  nlohmann::json init;
  init["kind"] = to_string(cfg.kind);
  if (cfg.kind == InitialKind::BezierCompatible) {
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& s : cfg.bezier) {
      nlohmann::json c;
      c["dir"] = s.dir_angle;
      c["d1"] = s.d1;
      c["d2"] = s.d2;
      if (s.end_angle)
        c["end_dir"] = *s.end_angle;
      else
        c["end_dir"] = nullptr;
      curves.push_back(c);
    }
    init["curves"] = curves;
  } else if (cfg.kind == InitialKind::ExampleFamily) {
    init["b"] = cfg.family_b;
  } else if (cfg.kind == InitialKind::GeodesicSampled) {
    init["alpha0"] = cfg.geodesic_alpha0;
  } else if (cfg.kind == InitialKind::Snapshot) {
    init["path"] = cfg.snapshot_path;
  }
  j["initial"] = init;
  j["J"] = cfg.J;
  j["dt"] = cfg.dt_text;
  j["T"] = cfg.T;
  if (cfg.eps_sing)
    j["eps_sing"] = *cfg.eps_sing;
  else
    j["eps_sing"] = nullptr;
  j["eps_steady"] = cfg.eps_steady;
  j["outputs"] = {{"csv", cfg.out_csv},
                  {"svg", cfg.out_svg},
                  {"snapshots", cfg.snapshot_times},
                  {"csv_every", cfg.csv_every}};
  return j;
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  auto fail = [](const std::string& path, const std::string& what) {
    throw std::runtime_error("config: " + path + ": " + what);
  };
  ExperimentConfig cfg;
  if (!j.contains("schema") || !j["schema"].is_number_integer() ||
      j["schema"].get<int>() != 1)
    fail("schema", "expected the integer 1");
  cfg.name = j.value("name", std::string("custom"));
  try {
    const auto& jj = j.at("junction");
    cfg.junction = {jj.at(0).get<double>(), jj.at(1).get<double>(),
                    jj.at(2).get<double>()};
  } catch (const nlohmann::json::exception& e) {
    fail("junction", e.what());
  }
  try {
    const auto& eps = j.at("endpoints");
    if (!eps.is_array() || eps.size() != 3) fail("endpoints", "need 3 entries");
    for (int a = 0; a < 3; ++a) {
      const auto& e = eps.at(a);
      cfg.endpoint_xy[a] = {e.at(0).get<double>(), e.at(1).get<double>()};
      if (e.size() > 2 && !e.at(2).is_null())
        cfg.endpoint_z[a] = e.at(2).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail("endpoints", e.what());
  }
  try {
    const auto& init = j.at("initial");
    const std::string kind = init.at("kind").get<std::string>();
    if (kind == "planar_line")
      cfg.kind = InitialKind::PlanarLine;
    else if (kind == "line3d")
      cfg.kind = InitialKind::Line3D;
    else if (kind == "bezier")
      cfg.kind = InitialKind::BezierCompatible;
    else if (kind == "example_family")
      cfg.kind = InitialKind::ExampleFamily;
    else if (kind == "geodesic")
      cfg.kind = InitialKind::GeodesicSampled;
    else if (kind == "snapshot")
      cfg.kind = InitialKind::Snapshot;
    else
      fail("initial.kind", "unknown kind '" + kind + "'");
    if (cfg.kind == InitialKind::BezierCompatible) {
      const auto& curves = init.at("curves");
      if (!curves.is_array() || curves.size() != 3)
        fail("initial.curves", "need 3 entries");
      for (int a = 0; a < 3; ++a) {
        const auto& c = curves.at(a);
        cfg.bezier[a].dir_angle = c.at("dir").get<double>();
        cfg.bezier[a].d1 = c.at("d1").get<double>();
        cfg.bezier[a].d2 = c.at("d2").get<double>();
        if (c.contains("end_dir") && !c.at("end_dir").is_null())
          cfg.bezier[a].end_angle = c.at("end_dir").get<double>();
      }
    } else if (cfg.kind == InitialKind::ExampleFamily) {
      const auto& b = init.at("b");
      for (int a = 0; a < 3; ++a) cfg.family_b[a] = b.at(a).get<double>();
    } else if (cfg.kind == InitialKind::GeodesicSampled) {
      cfg.geodesic_alpha0 = init.value("alpha0", 0.0);
    } else if (cfg.kind == InitialKind::Snapshot) {
      cfg.snapshot_path = init.at("path").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail("initial", e.what());
  }
  try {
    cfg.J = j.at("J").get<int>();
    if (cfg.J < 2) fail("J", "need J >= 2");
    if (j.at("dt").is_string())
      cfg.dt_text = j.at("dt").get<std::string>();
    else
      cfg.dt_text = j.at("dt").dump();
    if (!(cfg.dt() > 0.0)) fail("dt", "must be positive");
    cfg.T = j.at("T").get<double>();
    if (j.contains("eps_sing") && !j.at("eps_sing").is_null())
      cfg.eps_sing = j.at("eps_sing").get<double>();
    cfg.eps_steady = j.value("eps_steady", 1e-6);
  } catch (const nlohmann::json::exception& e) {
    fail("parameters", e.what());
  }
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    cfg.out_csv = o.value("csv", true);
    cfg.out_svg = o.value("svg", false);
    cfg.csv_every = o.value("csv_every", 1);
    if (o.contains("snapshots"))
      cfg.snapshot_times = o.at("snapshots").get<std::vector<double>>();
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

inline void save_config(const ExperimentConfig& cfg, const std::string& path) {
  write_text_file(path, config_to_json(cfg).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// runner

struct ExperimentRun {
  FlowOutcome outcome;
  std::vector<std::string> files;
};

inline ExperimentRun run_experiment(const ExperimentConfig& cfg,
                                    const std::string& out_dir) {
  namespace fs = std::filesystem;
  ExperimentRun run;
  const TriodState initial = build_initial(cfg);
  const double dt = cfg.dt();
  const long long last_step = std::max(1LL, std::llround(cfg.T / dt));

  std::vector<std::pair<long long, double>> wanted;  // step index, requested t
  for (double t : cfg.snapshot_times) {
    long long idx = std::llround(t / dt);
    idx = std::max(0LL, std::min(idx, last_step));
    wanted.emplace_back(idx, t);
  }
  std::vector<TriodFrame> frames{TriodFrame::of(initial)};
  std::vector<std::pair<double, TriodState>> snaps;
  for (const auto& [idx, t] : wanted)
    if (idx == 0) snaps.emplace_back(t, initial);

  FlowParams params;
  params.dt = dt;
  params.T = cfg.T;
  params.eps_sing = cfg.eps_sing ? *cfg.eps_sing : 0.0;
  params.eps_steady = cfg.eps_steady;
  const StepCallback on_step = [&](int m, const TriodState& s, const StepSolution&) {
    for (const auto& [idx, t] : wanted)
      if (idx == m) snaps.emplace_back(t, s);
  };
  run.outcome = run_flow(initial, params, on_step);

  // requests beyond an early stop resolve to the nearest completed step
  const double reached = run.outcome.final_state.time();
  for (const auto& [idx, t] : wanted)
    if (idx * dt > reached + 0.5 * dt) snaps.emplace_back(t, run.outcome.final_state);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto emit = [&](const std::string& name, const std::string& text) {
      const std::string path = (fs::path(out_dir) / name).string();
      write_text_file(path, text);
      run.files.push_back(path);
    };
    emit("config.json", config_to_json(cfg).dump(2) + "\n");
    if (cfg.out_csv)
      emit("energy.csv", energy_csv(run.outcome.series, cfg.csv_every));
    for (const auto& [t, state] : snaps) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_t%.6g.csv", t);
      emit(name, snapshot_csv(state));
    }
    emit("final_state.csv", snapshot_csv(run.outcome.final_state));
    if (cfg.out_svg) {
      for (const auto& [t, state] : snaps) frames.push_back(TriodFrame::of(state));
      frames.push_back(TriodFrame::of(run.outcome.final_state));
      emit("projected.svg", svg_projected(frames));
      emit("energy.svg", svg_energy(run.outcome.series));
    }
  }
  return run;
}

}  // namespace heistriod
