#pragma once

// Deterministic static SVG output. Projected-triod plots follow the colour
// convention olive/purple/gold for the three curves at a single time and
// blue/black/red for initial/intermediate/final data across times. Energy
// plots are plain polylines of the series. Fixed viewbox and fixed decimal
// formatting keep repeated runs byte-identical.

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "heistriod/discrete.hpp"
#include "heistriod/flow.hpp"

namespace heistriod {

namespace detail {

struct SvgBox {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void take(Vec2 p) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  void pad() {
    const double dx = std::max(1e-6, xmax - xmin);
    const double dy = std::max(1e-6, ymax - ymin);
    xmin -= 0.05 * dx;
    xmax += 0.05 * dx;
    ymin -= 0.05 * dy;
    ymax += 0.05 * dy;
  }
};

inline std::string svg_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string svg_polyline(const std::vector<Vec2>& pts, const SvgBox& box,
                                int width, int height, const char* color) {
  const double sx = width / (box.xmax - box.xmin);
  const double sy = height / (box.ymax - box.ymin);
  std::string out = "  <polyline fill=\"none\" stroke=\"";
  out += color;
  out += "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += svg_number((pts[i].x - box.xmin) * sx);
    out += ',';
    out += svg_number((box.ymax - pts[i].y) * sy);
  }
  out += "\"/>\n";
  return out;
}

}  // namespace detail

struct TriodFrame {
  double t = 0.0;
  std::array<PlanarPolyline, 3> curves;

  static TriodFrame of(const TriodState& s) {
    return {s.time(), {s.curve(0), s.curve(1), s.curve(2)}};
  }
};

/// Projected triod(s). One frame paints the three curves olive/purple/gold;
/// several frames paint whole triods blue (first), black (middle), red (last).
inline std::string svg_projected(const std::vector<TriodFrame>& frames,
                                 int width = 640, int height = 640) {
  if (frames.empty()) throw std::invalid_argument("svg_projected: no frames");
  detail::SvgBox box;
  for (const auto& f : frames)
    for (const auto& c : f.curves)
      for (const Vec2& p : c.nodes) box.take(p);
  box.pad();

  std::string out;
  char head[160];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  out += head;
  static const std::array<const char*, 3> curve_colors{"olive", "purple", "gold"};
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const char* time_color =
        i == 0 ? "blue" : (i + 1 == frames.size() ? "red" : "black");
    for (int a = 0; a < 3; ++a) {
      const char* color = frames.size() == 1 ? curve_colors[a] : time_color;
      out += detail::svg_polyline(frames[i].curves[a].nodes, box, width, height,
                                  color);
    }
  }
  out += "</svg>\n";
  return out;
}

/// Energy plot: total length over time, with the per-curve lengths in the
/// single-time curve colours.
inline std::string svg_energy(const std::vector<SeriesRow>& series,
                              int width = 640, int height = 480) {
  if (series.empty()) throw std::invalid_argument("svg_energy: empty series");
  detail::SvgBox box;
  for (const SeriesRow& r : series) {
    box.take({r.t, r.total_length});
    for (double L : r.length) box.take({r.t, L});
  }
  box.pad();
  std::string out;
  char head[256];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n"
                "  <rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" "
                "fill=\"white\" stroke=\"black\"/>\n",
                width, height, width, height, width, height);
  out += head;
  auto column = [&](auto&& get) {
    std::vector<Vec2> pts;
    pts.reserve(series.size());
    for (const SeriesRow& r : series) pts.push_back({r.t, get(r)});
    return pts;
  };
  static const std::array<const char*, 3> curve_colors{"olive", "purple", "gold"};
  for (int a = 0; a < 3; ++a)
    out += detail::svg_polyline(column([&](const SeriesRow& r) { return r.length[a]; }),
                                box, width, height, curve_colors[a]);
  out += detail::svg_polyline(column([](const SeriesRow& r) { return r.total_length; }),
                              box, width, height, "black");
  char label[160];
  std::snprintf(label, sizeof label,
                "  <text x=\"8\" y=\"16\" font-size=\"12\">t in [%s, %s], length "
                "in [%s, %s]</text>\n",
                detail::svg_number(series.front().t).c_str(),
                detail::svg_number(series.back().t).c_str(),
                detail::svg_number(box.ymin).c_str(),
                detail::svg_number(box.ymax).c_str());
  out += label;
  out += "</svg>\n";
  return out;
}

}  // namespace heistriod
