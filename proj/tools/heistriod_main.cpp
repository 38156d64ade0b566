// Command-line front end: run experiments (built-in presets or JSON configs),
// evaluate connecting geodesics, lift planar curves, and verify experiments
// against their reference behaviour.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heistriod/csv.hpp"
#include "heistriod/experiments.hpp"
#include "heistriod/geodesics.hpp"
#include "heistriod/verify.hpp"

namespace {

using namespace heistriod;

HPoint parse_point(const std::string& text) {
  HPoint p;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &p.x, &p.y, &p.z) != 3)
    throw CLI::ValidationError("expected x,y,z, got '" + text + "'");
  return p;
}

std::string default_out_root() {
  if (const char* env = std::getenv("HEIS_TRIOD_OUT")) return env;
  return "out";
}

int exit_code(FlowStatus status) {
  switch (status) {
    case FlowStatus::ReachedT: return 0;
    case FlowStatus::SteadyState: return 2;
    case FlowStatus::Singularity: return 3;
    case FlowStatus::NumericFailure: return 4;
  }
  return 4;
}

int cmd_run(const std::optional<int>& experiment, const std::string& config_path,
            const std::optional<int>& J, const std::string& dt,
            const std::optional<double>& T, const std::optional<double>& eps_sing,
            const std::optional<double>& eps_steady, std::string out_dir, bool svg,
            const std::vector<double>& snapshots, int csv_every) {
  ExperimentConfig cfg;
  if (experiment)
    cfg = builtin_experiment(*experiment);
  else
    cfg = load_config(config_path);
  if (J) cfg.J = *J;
  if (!dt.empty()) cfg.set_dt(dt);
  if (T) cfg.T = *T;
  if (eps_sing) cfg.eps_sing = *eps_sing;
  if (eps_steady) cfg.eps_steady = *eps_steady;
  if (svg) cfg.out_svg = true;
  if (!snapshots.empty()) cfg.snapshot_times = snapshots;
  if (csv_every > 1) cfg.csv_every = csv_every;
  if (out_dir.empty())
    out_dir = (std::filesystem::path(default_out_root()) / cfg.name).string();

  const ExperimentRun run = run_experiment(cfg, out_dir);
  const FlowOutcome& out = run.outcome;
  std::printf("%s: %s at t=%.6g, lengths %.6g / %.6g / %.6g (total %.6g)\n",
              cfg.name.c_str(), to_string(out.status), out.final_state.time(),
              out.final_state.curve_length(0), out.final_state.curve_length(1),
              out.final_state.curve_length(2), out.final_state.total_length());
  if (out.vanished_curve)
    std::printf("vanished curve: %d\n", *out.vanished_curve + 1);
  if (!out.message.empty()) std::printf("note: %s\n", out.message.c_str());
  for (const std::string& f : run.files) std::printf("wrote %s\n", f.c_str());
  return exit_code(out.status);
}

int cmd_geodesic(const std::string& from, const std::string& to, int samples,
                 const std::string& out_path, double alpha0) {
  const HPoint P = parse_point(from), Q = parse_point(to);
  const Geodesic g = geodesic_between(P, Q, samples, alpha0);
  const char* kind = g.spec.kind == GeodesicKind::Line  ? "line"
                     : g.spec.kind == GeodesicKind::Arc ? "arc"
                                                        : "vertical_family";
  std::printf("kind=%s length=%.12g lambda=%.12g alpha0=%.12g", kind, g.spec.s_f,
              g.spec.lambda, g.spec.alpha0);
  if (g.spec.kind != GeodesicKind::Line)
    std::printf(" radius=%.12g center=%.12g,%.12g", 1.0 / std::abs(g.spec.lambda),
                g.spec.center.x, g.spec.center.y);
  if (g.spec.kind == GeodesicKind::VerticalFamily)
    std::printf(" k_cover=%d", g.spec.k_cover);
  std::printf("\n");
  if (!out_path.empty()) {
    write_text_file(out_path, hpolyline_csv(g.curve));
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_lift(const std::string& in_path, const std::string& anchor,
             const std::string& out_path) {
  double z = 0.0;
  LiftAnchor a;
  if (std::sscanf(anchor.c_str(), "start:%lf", &z) == 1)
    a = LiftAnchor::at_start(z);
  else if (std::sscanf(anchor.c_str(), "end:%lf", &z) == 1)
    a = LiftAnchor::at_end(z);
  else
    throw CLI::ValidationError("anchor must be start:z or end:z, got '" + anchor +
                               "'");
  const PlanarPolyline c = parse_planar_csv(read_text_file(in_path));
  const HPolyline g = horizontal_lift(c, a);
  const std::string csv = hpolyline_csv(g);
  if (out_path.empty())
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  else {
    write_text_file(out_path, csv);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_verify(int experiment) {
  ExperimentCache cache;
  const std::vector<CheckResult> results = verify_experiment(experiment, cache);
  bool all = true;
  for (const CheckResult& r : results) {
    std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"horizontal triod flows in the first Heisenberg group"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment and write its outputs");
  std::optional<int> experiment;
  std::string config_path;
  std::optional<int> J;
  std::string dt;
  std::optional<double> T, eps_sing, eps_steady;
  std::string out_dir;
  bool svg = false;
  std::vector<double> snapshots;
  int csv_every = 1;
  auto* exp_opt =
      run->add_option("--experiment", experiment, "built-in experiment id (1..15)")
          ->check(CLI::Range(1, kBuiltinExperimentCount));
  run->add_option("--config", config_path, "JSON experiment config")
      ->excludes(exp_opt);
  run->add_option("--J", J, "segments per curve");
  run->add_option("--dt", dt, "time step size (decimal literal)");
  run->add_option("--T", T, "final time");
  run->add_option("--eps-sing", eps_sing, "curve-vanishing threshold");
  run->add_option("--eps-steady", eps_steady,
                  "steady-state displacement threshold (0 disables)");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--svg", svg, "write SVG plots");
  run->add_option("--snapshots", snapshots, "snapshot times")->delimiter(',');
  run->add_option("--csv-every", csv_every, "thin the energy CSV to every Nth row");

  auto* geo =
      app.add_subcommand("geodesic", "connecting geodesic between two points");
  std::string from, to;
  int samples = 100;
  std::string geo_out;
  double alpha0 = 0.0;
  geo->add_option("--from", from, "start point x,y,z")->required();
  geo->add_option("--to", to, "end point x,y,z")->required();
  geo->add_option("--samples", samples, "polyline segments");
  geo->add_option("--alpha0", alpha0,
                  "initial tangent angle for the vertical family");
  geo->add_option("--out", geo_out, "write the sampled curve CSV here");

  auto* lift = app.add_subcommand("lift", "horizontal lift of a planar curve CSV");
  std::string lift_in, lift_anchor = "start:0", lift_out;
  lift->add_option("--in", lift_in, "planar curve CSV (x,y rows)")->required();
  lift->add_option("--anchor", lift_anchor, "start:z or end:z");
  lift->add_option("--out", lift_out, "output path (default stdout)");

  auto* verify = app.add_subcommand(
      "verify", "check an experiment against its reference behaviour");
  int verify_id = 1;
  verify->add_option("--experiment", verify_id, "experiment id (1..15)")
      ->required()
      ->check(CLI::Range(1, kBuiltinExperimentCount));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!experiment && config_path.empty())
        throw CLI::ValidationError("run needs --experiment or --config");
      return cmd_run(experiment, config_path, J, dt, T, eps_sing, eps_steady,
                     out_dir, svg, snapshots, csv_every);
    }
    if (geo->parsed()) return cmd_geodesic(from, to, samples, geo_out, alpha0);
    if (lift->parsed()) return cmd_lift(lift_in, lift_anchor, lift_out);
    if (verify->parsed()) return cmd_verify(verify_id);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
