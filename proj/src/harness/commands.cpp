#include "driftplan/harness/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "driftplan/error.hpp"
#include "driftplan/harness/output.hpp"
#include "driftplan/text.hpp"

namespace driftplan::harness {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string> header(const RunConfig& cfg, const std::string& what) {
  return {"driftplan " + what, "config_hash=" + text::hex64(cfg.hash()),
          "track=" + cfg.track_path.filename().generic_string(),
          "manifold=" + cfg.manifold_path.filename().generic_string()};
}

esm::Manifold load_checked_manifold(const RunConfig& cfg, std::ostream& log) {
  auto res = esm::load_manifold(cfg.manifold_path, esm::parameter_hash(cfg.vehicle, cfg.tires));
  for (const auto& w : res.warnings) log << "warning: " << w << '\n';
  if (res.manifold.empty()) throw ConfigError("manifold '" + cfg.manifold_path.string() + "' has an empty domain");
  return std::move(res.manifold);
}

track::Track load_checked_track(const RunConfig& cfg, std::ostream& log) {
  std::vector<std::string> warnings;
  track::Track t = track::load_track(cfg.track_path, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << '\n';
  return t;
}

std::string manifold_summary(const esm::Manifold& m) {
  double inf = std::numeric_limits<double>::infinity();
  double b0 = inf, b1 = -inf, p0 = inf, p1 = -inf, v0 = inf, v1 = -inf, r0 = inf, r1 = -inf;
  int unstable = 0;
  for (const auto& s : m.samples()) {
    b0 = std::min(b0, s.beta);
    b1 = std::max(b1, s.beta);
    p0 = std::min(p0, s.psidot);
    p1 = std::max(p1, s.psidot);
    v0 = std::min(v0, s.v);
    v1 = std::max(v1, s.v);
    r0 = std::min(r0, std::abs(s.radius));
    r1 = std::max(r1, std::abs(s.radius));
    unstable += s.unstable ? 1 : 0;
  }
  return fmt::format(
      "samples {}\ntriangles {}\nunstable_samples {}\nbeta_range {:.4f} {:.4f}\npsidot_range {:.4f} {:.4f}\n"
      "v_range {:.4f} {:.4f}\nradius_range {:.4f} {:.4f}\nparam_hash {}\n",
      m.samples().size(), m.triangles().size(), unstable, b0, b1, p0, p1, v0, v1, r0, r1, text::hex64(m.param_hash()));
}

}  // namespace

vehicle::FullState initial_state(const RunConfig& cfg, const track::Track& track) {
  vehicle::FullState st;
  const auto start = track.position_at(0.0);
  st.pose.x = cfg.initial.x.value_or(start.x);
  st.pose.y = cfg.initial.y.value_or(start.y);
  st.pose.psi = vehicle::wrap_angle(cfg.initial.psi.value_or(track.heading_at(0.0)));
  st.dyn = {cfg.initial.v, cfg.initial.beta, cfg.initial.psidot};
  return st;
}

int cmd_esm_build(const RunConfig& cfg, std::ostream& log) {
  require_inputs(cfg, Command::kEsmBuild);
  const auto sweep = esm::sweep_inputs(cfg.sweep, cfg.vehicle, cfg.tires, cfg.sweep_options);
  const auto m = esm::build_manifold(sweep.points(), cfg.domain, esm::parameter_hash(cfg.vehicle, cfg.tires));
  if (cfg.manifold_path.has_parent_path()) fs::create_directories(cfg.manifold_path.parent_path());
  esm::save_manifold(m, cfg.manifold_path);

  std::string summary = fmt::format("# config_hash={}\ncells {}\nconverged {}\ndegenerate {}\nconvergence_rate {:.4f}\n",
                                    text::hex64(cfg.hash()), sweep.cells.size(), sweep.converged_count(),
                                    sweep.degenerate_count(), sweep.convergence_rate());
  summary += manifold_summary(m);
  write_file(cfg.out_dir / "esm_summary.txt", summary);
  if (cfg.plots) write_file(cfg.out_dir / "manifold.svg", manifold_svg(m));
  log << summary << "manifold written to " << cfg.manifold_path.string() << '\n';
  return kExitOk;
}

int cmd_esm_show(const RunConfig& cfg, std::ostream& log) {
  require_inputs(cfg, Command::kEsmShow);
  const esm::Manifold m = load_checked_manifold(cfg, log);
  log << manifold_summary(m);
  if (cfg.plots) write_file(cfg.out_dir / "manifold.svg", manifold_svg(m));
  return kExitOk;
}

int cmd_plan(const RunConfig& cfg, std::ostream& log) {
  require_inputs(cfg, Command::kPlan);
  const track::Track track = load_checked_track(cfg, log);
  const esm::Manifold m = load_checked_manifold(cfg, log);
  const planner::PlanningContext ctx(track, m, cfg.vehicle, cfg.tires, cfg.planner);

  const auto plan = planner::search(initial_state(cfg, track), ctx);
  const auto rows = plan_samples(plan, track, cfg.planner.dt());

  std::ostringstream csv;
  write_trajectory_csv(csv, rows, header(cfg, "plan"));
  write_file(cfg.out_dir / "plan.csv", csv.str());
  write_file(cfg.out_dir / "plan_stats.txt", "# config_hash=" + text::hex64(cfg.hash()) + "\n" + plan.stats.to_text());
  write_file(cfg.out_dir / "timing.txt", fmt::format("search_wall_time {:.6f}\n", plan.stats.wall_time));
  if (cfg.plots) write_file(cfg.out_dir / "plan.svg", plan_svg(track, plan));

  double max_beta = 0.0;
  for (const auto& r : rows) max_beta = std::max(max_beta, std::abs(r.state.dyn.beta));
  log << fmt::format("depth {} of {}, progress {:.2f} m, max |beta| {:.3f} rad, {} expansions, {:.2f} s\n",
                     plan.steps.size(), cfg.planner.k_hor, plan.progress(), max_beta, plan.stats.expansions,
                     plan.stats.wall_time);
  return kExitOk;
}

int cmd_lap(const RunConfig& cfg, std::ostream& log, LapMetrics* metrics_out) {
  require_inputs(cfg, Command::kLap);
  const track::Track track = load_checked_track(cfg, log);
  const esm::Manifold m = load_checked_manifold(cfg, log);
  const planner::PlanningContext ctx(track, m, cfg.vehicle, cfg.tires, cfg.planner);

  planner::StopCondition stop;
  stop.progress = cfg.laps * track.length();
  stop.max_cycles = cfg.max_cycles;
  const auto run = planner::replan_loop(initial_state(cfg, track), ctx, stop);
  const LapMetrics metrics = compute_lap_metrics(run, track, cfg.drift_threshold);
  if (metrics_out) *metrics_out = metrics;

  std::ostringstream csv, cycles;
  write_trajectory_csv(csv, run.log, header(cfg, "lap"));
  write_cycles_csv(cycles, run.cycles, header(cfg, "cycles"));
  write_file(cfg.out_dir / "lap.csv", csv.str());
  write_file(cfg.out_dir / "cycles.csv", cycles.str());
  nlohmann::json j = to_json(metrics, false);
  j["config_hash"] = text::hex64(cfg.hash());
  j["laps"] = cfg.laps;
  if (!run.failure.empty()) j["failure"] = run.failure;
  write_file(cfg.out_dir / "metrics.json", j.dump(2) + "\n");
  write_file(cfg.out_dir / "timing.json", nlohmann::json{{"cycle_wall_time", metrics.cycle_wall_time}}.dump(2) + "\n");
  if (cfg.plots) {
    write_file(cfg.out_dir / "lap_track.svg", lap_track_svg(track, run.log, cfg.drift_threshold));
    write_file(cfg.out_dir / "lap_states.svg", lap_states_svg(run.log, cfg.drift_threshold));
  }

  double wall = 0.0;
  for (double w : metrics.cycle_wall_time) wall += w;
  log << fmt::format("{} cycles, lap time {:.2f} s, progress {:.1f} of {:.1f} m, max |beta| {:.3f} rad, "
                     "{} drift intervals, min edge margin {:.3f} m, planning {:.1f} s\n",
                     run.cycles.size(), metrics.lap_time, metrics.total_s, stop.progress, metrics.max_abs_beta,
                     metrics.drift.size(), metrics.min_edge_margin, wall);
  if (!run.completed) {
    log << "lap not completed: " << (run.failure.empty() ? "cycle limit reached" : run.failure) << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const IoError*>(&e)) {
    return kExitConfig;
  }
  return kExitFailure;
}

}  // namespace driftplan::harness
