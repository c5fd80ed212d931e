// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "driftplan/esm/manifold.hpp"
#include "driftplan/esm/sweep.hpp"
#include "driftplan/harness/config.hpp"
#include "driftplan/harness/metrics.hpp"
#include "driftplan/planner/replan.hpp"
#include "driftplan/planner/search.hpp"
#include "driftplan/track/track.hpp"
#include "driftplan/vehicle/dynamics.hpp"
#include "driftplan/vehicle/tire.hpp"

using namespace driftplan;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  fmt::print("criterion {} {}: {} ({})\n", id, name, o.pass ? "PASS" : "FAIL", o.detail);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

const vehicle::VehicleParams kParams;
const vehicle::TireParams kTires;

// Settings of the harness when no config file overrides anything.
const harness::RunConfig kDefaults;

struct Built {
  esm::SweepResult sweep;
  esm::Manifold manifold;
  double seconds = 0.0;
};

Built build_default_manifold() {
  Built b;
  const auto t0 = Clock::now();
  b.sweep = esm::sweep_inputs(kDefaults.sweep, kParams, kTires, kDefaults.sweep_options);
  b.manifold = esm::build_manifold(b.sweep.points(), kDefaults.domain, esm::parameter_hash(kParams, kTires));
  b.seconds = seconds_since(t0);
  return b;
}

Outcome equilibrium_correctness(const Built& b) {
  double worst_res = 0.0, worst_drift = 0.0;
  int unstable = 0, bad = 0;
  for (const auto& s : b.manifold.samples()) {
    const vehicle::DynamicState x{s.v, s.beta, s.psidot};
    const vehicle::ControlInput u{s.delta, s.lambda};
    const auto d = vehicle::full_model_derivatives(x, u, kParams, kTires);
    const double res = std::max({std::abs(d.vdot), std::abs(d.betadot), std::abs(d.psiddot)});
    worst_res = std::max(worst_res, res);
    const auto traj = vehicle::rollout_dynamics(x, u, 5.0, 500, vehicle::Model::kFull, kParams, kTires);
    double drift = 0.0;
    for (const auto& y : traj) {
      drift = std::max({drift, std::abs(y.v - x.v), std::abs(y.beta - x.beta), std::abs(y.psidot - x.psidot)});
    }
    if (s.unstable) {
      ++unstable;
    } else {
      worst_drift = std::max(worst_drift, drift);
      if (drift >= 1e-3) ++bad;
    }
    if (res >= 1e-8) ++bad;
  }
  const double rate = b.sweep.convergence_rate();
  Outcome o;
  o.pass = bad == 0 && rate >= 0.9 && b.seconds < 60.0 && !b.manifold.empty();
  o.detail = fmt::format("{} samples, max residual {:.2e}, max 5 s drift {:.2e}, {} tagged unstable, "
                         "convergence {:.3f}, build {:.1f} s",
                         b.manifold.samples().size(), worst_res, worst_drift, unstable, rate, b.seconds);
  return o;
}

Outcome manifold_domain(const esm::Manifold& m) {
  double r_min = std::numeric_limits<double>::infinity();
  for (const auto& s : m.samples()) r_min = std::min(r_min, std::abs(s.radius));

  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::size_t> pick(0, m.triangles().size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int queried = 0;
  while (queried < 1000) {
    const auto& tri = m.triangles()[pick(rng)];
    double a = u(rng), b = u(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const auto& p0 = m.samples()[tri[0]];
    const auto& p1 = m.samples()[tri[1]];
    const auto& p2 = m.samples()[tri[2]];
    const double beta = p0.beta + a * (p1.beta - p0.beta) + b * (p2.beta - p0.beta);
    const double psidot = p0.psidot + a * (p1.psidot - p0.psidot) + b * (p2.psidot - p0.psidot);
    const auto q = m.query(beta, psidot);
    if (!q) continue;
    worst = std::max(worst, std::abs(q->v / q->radius - psidot) / psidot);
    ++queried;
  }
  Outcome o;
  o.pass = std::abs(r_min - 10.0) <= 0.2 && worst < 0.05;
  o.detail = fmt::format("min R_c {:.3f} m, worst |psidot - v/R_c|/psidot {:.4f} over {} queries", r_min, worst,
                         queried);
  return o;
}

Outcome drift_emergence(const esm::Manifold& m) {
  const double approach = 20.0, v0 = 8.0;
  const track::Track t(track::uturn_waypoints(15.0, approach, 60.0), 10.0, false);
  const planner::PlanningContext ctx(t, m, kParams, kTires, kDefaults.planner);
  const auto r = planner::search({{0.0, 0.0, 0.0}, {v0, 0.0, 0.0}}, ctx);
  double peak = 0.0;
  for (const auto& st : r.steps) peak = std::max(peak, std::abs(st.node.state.dyn.beta));
  Outcome o;
  o.pass = peak > 0.4 && r.stats.wall_time < 30.0;
  o.detail = fmt::format("15 m U-turn, {} m approach, v0 {} m/s: max node |beta| {:.3f} rad, depth {}, {:.1f} s",
                         approach, v0, peak, r.steps.size(), r.stats.wall_time);
  return o;
}

Outcome full_lap(const esm::Manifold& m) {
  const track::Track t(track::mixed_circuit_waypoints(), 10.0, true);
  const planner::PlannerConfig& c = kDefaults.planner;
  const planner::PlanningContext ctx(t, m, kParams, kTires, c);
  vehicle::FullState s0;
  const auto p = t.position_at(0.0);
  s0.pose = {p.x, p.y, t.heading_at(0.0)};
  s0.dyn = {kDefaults.initial.v, 0.0, 0.0};
  planner::StopCondition stop;
  stop.progress = t.length();
  stop.max_cycles = kDefaults.max_cycles;
  const auto t0 = Clock::now();
  const auto run = planner::replan_loop(s0, ctx, stop);
  const double wall = seconds_since(t0);
  const auto metrics = harness::compute_lap_metrics(run, t, kDefaults.drift_threshold);

  // |dv| between consecutive nodes: every cycle executes whole primitives,
  // so node states sit at multiples of substeps in the log.
  const auto stride = static_cast<std::size_t>(c.substeps);
  double dv_prim = 0.0;
  for (std::size_t i = stride; i < run.log.size(); i += stride) {
    dv_prim = std::max(dv_prim, std::abs(run.log[i].state.dyn.v - run.log[i - stride].state.dyn.v));
  }
  const double bound = c.a_max * c.T_s;
  Outcome o;
  o.pass = run.completed && metrics.min_edge_margin > 0.0 && metrics.max_dv_step < bound && dv_prim < bound &&
           wall < 600.0;
  o.detail = fmt::format("{}, lap time {:.1f} s, min edge margin {:.3f} m, max |dv| per sample {:.4f} and per "
                         "node {:.3f} (bound {:.3f}), max |beta| {:.3f} rad in {} drift intervals, wall {:.1f} s",
                         run.completed ? "completed" : "not completed: " + run.failure, metrics.lap_time,
                         metrics.min_edge_margin, metrics.max_dv_step, dv_prim, bound, metrics.max_abs_beta,
                         metrics.drift.size(), wall);
  return o;
}

// The small instance shared by criteria 5 and 6.
struct SmallInstance {
  track::Track track{track::circle_waypoints(20.0, 72), 10.0, true};
  planner::PlannerConfig config;
  vehicle::FullState start;

  explicit SmallInstance(const esm::Manifold& m) {
    config.k_hor = 3;
    config.bicycle_enabled = false;
    config.sample_center = false;
    config.inner_count = 3;
    config.outer_count = 0;
    config.profile_slack = std::numeric_limits<double>::infinity();
    const double beta = -0.25, psidot = 0.45;
    const auto q = m.query(beta, psidot);
    const auto p = track.position_at(0.0);
    start.pose = {p.x, p.y, vehicle::wrap_angle(track.heading_at(0.0) - beta)};
    start.dyn = {q ? q->v : 0.0, beta, psidot};
  }
};

struct Enumeration {
  int nodes = 0;
  int leaves = 0;
  int violations = 0;
  double best = -std::numeric_limits<double>::infinity();
  planner::Node best_leaf;
};

Enumeration enumerate(const planner::PlanningContext& ctx, const planner::Node& root) {
  Enumeration e;
  const int K = ctx.config.k_hor;
  std::function<double(const planner::Node&)> walk = [&](const planner::Node& n) {
    ++e.nodes;
    if (n.k == K) {
      ++e.leaves;
      if (n.progress > e.best) {
        e.best = n.progress;
        e.best_leaf = n;
      }
      return n.progress;
    }
    double sub = n.progress;
    for (const auto& ch : planner::expand(n, ctx)) sub = std::max(sub, walk(ch.node));
    const double h = ctx.bound.upper(n.s, n.state.dyn.v, (K - n.k) * ctx.config.T_s);
    if (h < sub - n.progress) ++e.violations;
    return sub;
  };
  walk(root);
  return e;
}

Outcome search_oracle(const esm::Manifold& m) {
  const SmallInstance inst(m);
  const planner::PlanningContext ctx(inst.track, m, kParams, kTires, inst.config);
  const Enumeration e = enumerate(ctx, planner::make_root(inst.start, ctx));
  const auto r = planner::search(inst.start, ctx);
  const bool same = !r.steps.empty() && r.steps.size() == 3 && r.progress() == e.best &&
                    r.steps.back().node.index == e.best_leaf.index &&
                    r.steps.back().node.remainder == e.best_leaf.remainder;
  Outcome o;
  o.pass = e.leaves > 0 && same;
  o.detail = fmt::format("{} leaves enumerated, exhaustive best {:.12f} m, A* {:.12f} m, leaf {}", e.leaves, e.best,
                         r.progress(), same ? "identical" : "different");
  return o;
}

Outcome admissibility(const esm::Manifold& m) {
  const SmallInstance inst(m);
  const planner::PlanningContext ctx(inst.track, m, kParams, kTires, inst.config);
  const Enumeration e = enumerate(ctx, planner::make_root(inst.start, ctx));
  Outcome o;
  o.pass = e.nodes > 1 && e.violations == 0;
  o.detail = fmt::format("{} nodes, {} violations", e.nodes, e.violations);
  return o;
}

Outcome straight_line(const esm::Manifold& m) {
  const track::Track t(track::straight_waypoints(300.0), 10.0, false);
  const planner::PlannerConfig& c = kDefaults.planner;
  const planner::PlanningContext ctx(t, m, kParams, kTires, c);
  Outcome o;
  o.pass = true;
  for (double v0 : {5.0, 10.0, c.v_max}) {
    const auto r = planner::search({{0.0, 0.0, 0.0}, {v0, 0.0, 0.0}}, ctx);
    const double D = planner::bang_bang_distance(v0, c.k_hor * c.T_s, c.a_max, c.v_max);
    const double rel = std::abs(r.progress() - D) / D;
    o.pass = o.pass && rel <= 0.02;
    o.detail += fmt::format("{}v0 {}: {:.2f} of {:.2f} m ({:.2f}%)", o.detail.empty() ? "" : "; ", v0, r.progress(),
                            D, 100.0 * rel);
  }
  return o;
}

Outcome property_suite() {
  std::vector<std::string> failed;
  std::mt19937 rng(99);

  {
    std::uniform_real_distribution<double> lam(-0.9, 2.0), alp(-1.5, 1.5);
    bool iso = true, odd = true, bound = true;
    for (int i = 0; i < 10000; ++i) {
      const auto s = vehicle::theoretical_slips(lam(rng), alp(rng));
      const auto f = vehicle::mf_friction(s, kTires);
      const double mag = std::hypot(f.mu_x, f.mu_y);
      iso = iso && std::abs(f.mu_x * s.sigma_y - f.mu_y * s.sigma_x) <= 1e-12 * (1.0 + s.sigma) &&
            std::abs(mag - vehicle::mf_magnitude(s.sigma, kTires)) <= 1e-12;
      const auto g = vehicle::mf_friction({-s.sigma_x, -s.sigma_y, s.sigma}, kTires);
      odd = odd && g.mu_x == -f.mu_x && g.mu_y == -f.mu_y;
      bound = bound && mag <= kTires.D;
    }
    if (!iso) failed.push_back("isotropy");
    if (!odd) failed.push_back("odd symmetry");
    if (!bound) failed.push_back("friction bound");
  }
  {
    bool ok = true;
    for (double ax = -8.0; ax <= 8.0; ax += 0.1) {
      const auto n = vehicle::normal_loads(kParams, ax);
      ok = ok && std::abs(n.F_zf + n.F_zr - kParams.m * kParams.g) <= 1e-9 * kParams.m * kParams.g;
    }
    if (!ok) failed.push_back("normal-load conservation");
  }
  {
    std::uniform_real_distribution<double> v(2.0, 20.0), b(-0.6, 0.6), r(-1.0, 1.0), d(-0.4, 0.4), l(-0.3, 0.8);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const vehicle::DynamicState s{v(rng), b(rng), r(rng)};
      const vehicle::ControlInput u{d(rng), l(rng)};
      const auto a = vehicle::full_model_derivatives(s, u, kParams, kTires);
      const auto m = vehicle::full_model_derivatives({s.v, -s.beta, -s.psidot}, {-u.delta, u.lambda}, kParams, kTires);
      worst = std::max({worst, std::abs(a.vdot - m.vdot), std::abs(a.betadot + m.betadot),
                        std::abs(a.psiddot + m.psiddot)});
    }
    if (worst > 1e-10) failed.push_back("left/right symmetry");
  }
  {
    double worst = 0.0;
    const std::vector<std::pair<track::Track, double>> tracks = {
        {track::Track(track::straight_waypoints(100.0), 10.0, false), 9.0},
        {track::Track(track::circle_waypoints(15.0, 72), 10.0, true), 9.0},
        {track::Track(track::s_curve_waypoints(20.0), 10.0, false), 9.0}};
    for (const auto& [t, dmax] : tracks) {
      std::uniform_real_distribution<double> s(1.0, t.length() - 1.0), d(-dmax, dmax);
      for (int i = 0; i < 1000; ++i) {
        const auto p = t.from_frenet({s(rng), d(rng)});
        const auto q = t.from_frenet(t.to_frenet(p));
        worst = std::max(worst, std::hypot(q.x - p.x, q.y - p.y));
      }
    }
    if (worst > 1e-6) failed.push_back("frenet round trip");
  }
  double order = 0.0;
  {
    // Reference by composite Simpson on a fine grid of the exact integrand.
    const double T = 2.0;
    auto vf = [](double t) { return 6.0 + 1.5 * t; };
    auto bf = [](double t) { return -0.1 - 0.2 * t; };
    auto pf = [](double t) { return 0.3 + 0.4 * t + 0.35 * t * t; };
    const int fine = 200000;
    double xr = 0.0, yr = 0.0;
    for (int i = 0; i <= fine; ++i) {
      const double t = T * i / fine;
      const double w = (i == 0 || i == fine) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      xr += w * vf(t) * std::cos(pf(t) + bf(t));
      yr += w * vf(t) * std::sin(pf(t) + bf(t));
    }
    xr *= T / fine / 3.0;
    yr *= T / fine / 3.0;
    std::vector<double> err;
    for (int n : {8, 16}) {
      std::vector<vehicle::DynamicState> traj;
      for (int i = 0; i <= n; ++i) {
        const double t = T * i / n;
        traj.push_back({vf(t), bf(t), 0.4 + 0.7 * t});
      }
      const auto poses = vehicle::integrate_kinematics({0.0, 0.0, 0.3}, traj, T / n);
      err.push_back(std::hypot(poses.back().x - xr, poses.back().y - yr));
    }
    order = std::log2(err[0] / err[1]);
    if (order < 3.5) failed.push_back("integrator order");
  }

  Outcome o;
  o.pass = failed.empty();
  if (o.pass) {
    o.detail = fmt::format("all properties hold, kinematic integrator order {:.2f}", order);
  } else {
    for (const auto& f : failed) o.detail += (o.detail.empty() ? "failed: " : ", ") + f;
  }
  return o;
}

}  // namespace

int main() {
  const Built b = build_default_manifold();
  report(1, "equilibrium correctness", equilibrium_correctness(b));
  report(2, "manifold domain", manifold_domain(b.manifold));
  report(3, "drift emergence", drift_emergence(b.manifold));
  report(4, "full lap", full_lap(b.manifold));
  report(5, "search optimality oracle", search_oracle(b.manifold));
  report(6, "heuristic admissibility", admissibility(b.manifold));
  report(7, "straight-line benchmark", straight_line(b.manifold));
  report(8, "property suite", property_suite());
  return failures == 0 ? 0 : 1;
}
