#pragma once

// CSV writers and readers for flow output. Energy series use the fixed
// column order t,L_total,L1,L2,L3,mu1,mu2,mu3,dissipation,angle_defect,
// z_spread; snapshots store full-precision node coordinates so a run can be
// restarted from them without loss.

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heistriod/discrete.hpp"
#include "heistriod/flow.hpp"
#include "heistriod/lifting.hpp"

namespace heistriod {

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace detail

inline constexpr const char* kEnergyCsvHeader =
    "t,L_total,L1,L2,L3,mu1,mu2,mu3,dissipation,angle_defect,z_spread";

inline std::string energy_csv(const std::vector<SeriesRow>& series,
                              int every = 1) {
  std::string out = kEnergyCsvHeader;
  out += '\n';
  const std::size_t n = series.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (every > 1 && i % every != 0 && i + 1 != n) continue;
    const SeriesRow& r = series[i];
    out += detail::fmt("%.12g", r.t);
    out += ',' + detail::fmt("%.12g", r.total_length);
    for (double L : r.length) out += ',' + detail::fmt("%.12g", L);
    for (double m : r.mu) out += ',' + detail::fmt("%.12g", m);
    out += ',' + detail::fmt("%.12g", r.dissipation);
    out += ',' + detail::fmt("%.12g", r.angle_defect);
    out += ',' + detail::fmt("%.12g", r.junction_z_spread);
    out += '\n';
  }
  return out;
}

/// Snapshot of a state with lifted z per node, restart-exact precision.
inline std::string snapshot_csv(const TriodState& state) {
  const LiftedTriod lifted = lift_triod(state);
  std::string out = "t,alpha,j,x,y,z\n";
  const int J = state.segment_count();
  char buf[160];
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j <= J; ++j) {
      const HPoint& p = lifted.curves[a].nodes[j];
      std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g,%.17g\n",
                    state.time(), a + 1, j, p.x, p.y, p.z);
      out += buf;
    }
  return out;
}

struct SnapshotData {
  TriodState state;
  double time = 0.0;
};

inline SnapshotData parse_snapshot_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,alpha,j", 0) != 0)
    throw std::runtime_error("snapshot: missing header row");
  std::array<std::vector<HPoint>, 3> nodes;
  double time = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 6) throw std::runtime_error("snapshot: bad row: " + line);
    time = std::stod(cells[0]);
    const int alpha = std::stoi(cells[1]);
    const int j = std::stoi(cells[2]);
    if (alpha < 1 || alpha > 3) throw std::runtime_error("snapshot: bad curve index");
    auto& v = nodes[alpha - 1];
    if (static_cast<int>(v.size()) != j)
      throw std::runtime_error("snapshot: rows out of order");
    v.push_back({std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5])});
  }
  const std::size_t n = nodes[0].size();
  if (n < 3 || nodes[1].size() != n || nodes[2].size() != n)
    throw std::runtime_error("snapshot: inconsistent node counts");
  std::array<PlanarPolyline, 3> curves;
  std::array<double, 3> endpoint_z{};
  for (int a = 0; a < 3; ++a) {
    for (const HPoint& p : nodes[a]) curves[a].nodes.push_back(p.planar());
    endpoint_z[a] = nodes[a].back().z;
  }
  SnapshotData out{TriodState::from_curves(curves, endpoint_z, time), time};
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

/// Planar curve rows "x,y" (optional header), for the lift subcommand.
inline PlanarPolyline parse_planar_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  PlanarPolyline c;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() < 2) throw std::runtime_error("curve csv: bad row: " + line);
    try {
      c.nodes.push_back({std::stod(cells[0]), std::stod(cells[1])});
    } catch (const std::invalid_argument&) {
      if (c.nodes.empty()) continue;  // header row
      throw std::runtime_error("curve csv: bad row: " + line);
    }
  }
  if (c.nodes.size() < 2) throw std::runtime_error("curve csv: need at least 2 rows");
  return c;
}

inline std::string hpolyline_csv(const HPolyline& g) {
  std::string out = "j,x,y,z\n";
  char buf[128];
  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", j, g.nodes[j].x,
                  g.nodes[j].y, g.nodes[j].z);
    out += buf;
  }
  return out;
}

}  // namespace heistriod
