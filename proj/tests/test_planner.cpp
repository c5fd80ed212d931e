#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "driftplan/error.hpp"
#include "driftplan/planner/replan.hpp"
#include "driftplan/planner/search.hpp"
#include "driftplan/vehicle/dynamics.hpp"
#include "support.hpp"

using namespace driftplan;
using namespace driftplan::planner;

namespace {

const vehicle::VehicleParams kParams;
const vehicle::TireParams kTires;

PlannerConfig plain_config() {
  PlannerConfig c;
  c.profile_slack = std::numeric_limits<double>::infinity();
  return c;
}

// Starting state on the circle track: a manifold equilibrium placed on the
// centerline with its course along the road.
FullState circle_start(const track::Track& t, double beta, double psidot) {
  const auto q = testsupport::default_manifold().query(beta, psidot);
  REQUIRE(q.has_value());
  FullState s;
  const auto p = t.position_at(0.0);
  s.pose = {p.x, p.y, vehicle::wrap_angle(t.heading_at(0.0) - beta)};
  s.dyn = {q->v, beta, psidot};
  return s;
}

}  // namespace

TEST_CASE("bang-bang distance") {
  CHECK(bang_bang_distance(5.0, 2.0, 2.5, 20.0) == doctest::Approx(15.0));
  CHECK(bang_bang_distance(18.0, 2.0, 2.5, 20.0) == doctest::Approx(18 * 0.8 + 1.25 * 0.64 + 20 * 1.2));
  CHECK(bang_bang_distance(20.0, 2.0, 2.5, 20.0) == doctest::Approx(40.0));
  CHECK(bang_bang_distance(22.0, 2.0, 2.5, 20.0) == doctest::Approx(44.0));
  CHECK(bang_bang_distance(10.0, 0.0, 2.5, 20.0) == 0.0);
}

TEST_CASE("progress bound") {
  const track::Track straight(track::straight_waypoints(300.0), 10.0, false);
  const ProgressBound sb(straight, 4.0, 2.5, 20.0, 0.0);
  CHECK(sb.upper(10.0, 5.0, 2.0) == doctest::Approx(15.0).epsilon(1e-9));

  // On a bend the bound lies above the centerline distance (corner cutting).
  const track::Track circle(track::circle_waypoints(20.0, 72), 10.0, true);
  const ProgressBound cb(circle, 4.0, 2.5, 20.0, 0.0);
  const double D = bang_bang_distance(8.0, 2.0, 2.5, 20.0);
  CHECK(cb.upper(3.0, 8.0, 2.0) >= D);
  // A point on the inner edge running at D along its own arc (radius 16)
  // covers D * 20 / 16 of centerline.
  CHECK(cb.upper(3.0, 8.0, 2.0) >= D * 20.0 / 16.0 - 1e-9);
}

TEST_CASE("grid discretization keeps the exact state") {
  const PlannerConfig c;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-50.0, 50.0), a(-3.1, 3.1), v(0.5, 20.0), b(-0.8, 0.8);
  for (int i = 0; i < 1000; ++i) {
    const FullState s{{u(rng), u(rng), a(rng)}, {v(rng), b(rng), b(rng)}};
    const Discretized d = discretize(s, c.grid_step);
    const auto back = reconstruct(d, c.grid_step);
    const auto orig = state_vector(s);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(d.remainder[k] >= 0.0);
      CHECK(d.remainder[k] < c.grid_step[k] * (1 + 1e-12));
      CHECK(back[k] == doctest::Approx(orig[k]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("config validation") {
  PlannerConfig c;
  CHECK_NOTHROW(validate(c));
  c.T_s = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = PlannerConfig{};
  c.k_hor = -1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = PlannerConfig{};
  c.delta_count = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK_NOTHROW(validate(default_planner_config()));
}

TEST_CASE("ring samples") {
  PlannerConfig c;
  c.sample_center = true;
  c.inner_count = 4;
  c.outer_count = 6;
  const auto r = ring_samples(-0.2, 0.5, c);
  CHECK(r.size() == 11);
  CHECK(r.front().first == -0.2);
  CHECK(r.front().second == 0.5);
  int inner = 0, outer = 0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double dist = std::hypot((r[i].first + 0.2) / c.beta_scale, (r[i].second - 0.5) / c.psidot_scale);
    inner += std::abs(dist - c.inner_radius) < 1e-12;
    outer += std::abs(dist - c.outer_radius) < 1e-12;
  }
  CHECK(inner == 4);
  CHECK(outer == 6);
}

TEST_CASE("collision check") {
  const track::Track t(track::straight_waypoints(100.0), 10.0, false);
  MotionPrimitive p;
  for (int i = 0; i <= 10; ++i) p.samples.push_back({{10.0 + i, 3.0, 0.0}, {5.0, 0.0, 0.0}});
  CHECK_FALSE(collision_check(p, t, 4.0, 10.0));
  p.samples[5].pose.y = 4.5;
  CHECK(collision_check(p, t, 4.0, 10.0));
  // The first sample belongs to the parent and is not checked.
  p.samples[5].pose.y = 3.0;
  p.samples[0].pose.y = 4.5;
  CHECK_FALSE(collision_check(p, t, 4.0, 10.0));
}

TEST_CASE("expanded children are consistent") {
  const track::Track t(track::circle_waypoints(20.0, 72), 10.0, true);
  const esm::Manifold& m = testsupport::default_manifold();
  const PlannerConfig c = default_planner_config();
  const PlanningContext ctx(t, m, kParams, kTires, c);

  for (const FullState& start : {circle_start(t, -0.25, 0.45), FullState{{20.0, 0.0, std::numbers::pi / 2},
                                                                          {5.0, 0.0, 0.25}}}) {
    const Node root = make_root(start, ctx);
    const auto children = expand(root, ctx);
    REQUIRE_FALSE(children.empty());
    for (const auto& ch : children) {
      const auto& prim = ch.primitive;
      REQUIRE(prim.samples.size() == static_cast<std::size_t>(c.substeps + 1));
      CHECK(prim.samples.front().pose.x == start.pose.x);
      CHECK(prim.samples.front().dyn.v == start.dyn.v);
      CHECK(ch.node.k == 1);
      CHECK(ch.node.g == doctest::Approx(-ch.node.progress));
      CHECK(ch.node.f == doctest::Approx(ch.node.g - ch.node.h));
      // Rule iii.
      CHECK(std::abs(ch.node.state.dyn.v - start.dyn.v) / c.T_s < c.a_max);
      // Node state is the grid reconstruction of the primitive end.
      const auto rec = reconstruct({ch.node.index, ch.node.remainder}, c.grid_step);
      const auto sv = state_vector(ch.node.state);
      for (std::size_t k = 0; k < 6; ++k) CHECK(rec[k] == doctest::Approx(sv[k]).epsilon(1e-12).scale(1.0));
      if (ch.node.mode == Mode::kEsm) {
        const auto q = m.query(ch.node.state.dyn.beta, ch.node.state.dyn.psidot);
        REQUIRE(q.has_value());
        CHECK(q->v == doctest::Approx(ch.node.state.dyn.v).epsilon(1e-12));
        CHECK(q->delta == doctest::Approx(ch.node.input.delta).epsilon(1e-12));
        CHECK(q->lambda == doctest::Approx(ch.node.input.lambda).epsilon(1e-12));
      }
      // Poses follow the kinematic equations over the sampled dynamic states.
      std::vector<vehicle::DynamicState> dyn;
      for (const auto& s : prim.samples) dyn.push_back(s.dyn);
      const auto poses = vehicle::integrate_kinematics(prim.samples.front().pose, dyn, c.dt());
      for (std::size_t i = 0; i < poses.size(); ++i) {
        CHECK(poses[i].x == doctest::Approx(prim.samples[i].pose.x).epsilon(1e-9));
        CHECK(poses[i].y == doctest::Approx(prim.samples[i].pose.y).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("bicycle mode only near straight driving") {
  PlannerConfig c;
  CHECK(bicycle_region({10.0, 0.05, 0.1}, c));
  CHECK_FALSE(bicycle_region({10.0, 0.2, 0.1}, c));
  CHECK_FALSE(bicycle_region({10.0, 0.05, 0.5}, c));
}

TEST_CASE("zero horizon returns an empty plan") {
  const track::Track t(track::straight_waypoints(100.0), 10.0, false);
  PlannerConfig c = default_planner_config();
  c.k_hor = 0;
  const PlanningContext ctx(t, testsupport::default_manifold(), kParams, kTires, c);
  const auto r = search({{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}}, ctx);
  CHECK(r.steps.empty());
  CHECK(r.progress() == 0.0);
}

TEST_CASE("search is deterministic and its path is continuous") {
  const track::Track t(track::uturn_waypoints(15.0, 20.0, 60.0), 10.0, false);
  PlannerConfig c = default_planner_config();
  c.k_hor = 6;
  const PlanningContext ctx(t, testsupport::default_manifold(), kParams, kTires, c);
  const FullState s0{{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}};
  const auto a = search(s0, ctx);
  const auto b = search(s0, ctx);
  REQUIRE(a.steps.size() == 6);
  REQUIRE(a.steps.size() == b.steps.size());
  CHECK(a.stats.expansions == b.stats.expansions);
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].node.index == b.steps[i].node.index);
    CHECK(a.steps[i].node.g == b.steps[i].node.g);
  }
  FullState prev = s0;
  double prev_g = 0.0;
  for (const auto& st : a.steps) {
    const auto& first = st.primitive.samples.front();
    CHECK(first.pose.x == doctest::Approx(prev.pose.x).epsilon(1e-12));
    CHECK(first.pose.y == doctest::Approx(prev.pose.y).epsilon(1e-12));
    CHECK(first.dyn.v == doctest::Approx(prev.dyn.v).epsilon(1e-12));
    const auto& last = st.primitive.samples.back();
    CHECK(last.pose.x == doctest::Approx(st.node.state.pose.x).epsilon(1e-12));
    CHECK(last.dyn.beta == doctest::Approx(st.node.state.dyn.beta).epsilon(1e-12));
    CHECK(st.node.g < prev_g);
    for (const auto& s : st.primitive.samples) {
      const auto fp = t.to_frenet(s.pose);
      CHECK(std::abs(fp.d) <= ctx.d_safe + 1e-9);
    }
    prev = st.node.state;
    prev_g = st.node.g;
  }
}

TEST_CASE("a* matches exhaustive enumeration on a small instance") {
  const track::Track t(track::circle_waypoints(20.0, 72), 10.0, true);
  PlannerConfig c = plain_config();
  c.k_hor = 3;
  c.bicycle_enabled = false;
  c.sample_center = false;
  c.inner_count = 3;
  c.outer_count = 0;
  const PlanningContext ctx(t, testsupport::default_manifold(), kParams, kTires, c);
  const FullState s0 = circle_start(t, -0.25, 0.45);
  const Node root = make_root(s0, ctx);

  double best = -std::numeric_limits<double>::infinity();
  Node best_leaf;
  int leaves = 0, violations = 0;
  std::function<double(const Node&)> walk = [&](const Node& n) {
    if (n.k == c.k_hor) {
      ++leaves;
      if (n.progress > best) {
        best = n.progress;
        best_leaf = n;
      }
      return n.progress;
    }
    double sub = n.progress;
    for (const auto& ch : expand(n, ctx)) sub = std::max(sub, walk(ch.node));
    const double base = ctx.bound.upper(n.s, n.state.dyn.v, (c.k_hor - n.k) * c.T_s);
    if (base < sub - n.progress) ++violations;
    return sub;
  };
  walk(root);
  REQUIRE(leaves > 0);
  CHECK(violations == 0);

  const auto r = search(s0, ctx);
  REQUIRE(r.steps.size() == 3);
  CHECK(r.progress() == best);
  CHECK(r.steps.back().node.index == best_leaf.index);
}

TEST_CASE("straight-line progress follows the bang-bang bound") {
  const track::Track t(track::straight_waypoints(300.0), 10.0, false);
  const PlannerConfig c = default_planner_config();
  const PlanningContext ctx(t, testsupport::default_manifold(), kParams, kTires, c);
  for (double v0 : {5.0, 10.0, c.v_max}) {
    const auto r = search({{0.0, 0.0, 0.0}, {v0, 0.0, 0.0}}, ctx);
    const double D = bang_bang_distance(v0, c.k_hor * c.T_s, c.a_max, c.v_max);
    CHECK(r.progress() == doctest::Approx(D).epsilon(0.02));
    CHECK(r.progress() <= D + 1e-9);
  }
}

TEST_CASE("replanning with T_rep equal to the horizon executes the plan") {
  const track::Track t(track::straight_waypoints(300.0), 10.0, false);
  PlannerConfig c = default_planner_config();
  c.k_hor = 4;
  c.T_rep = c.k_hor * c.T_s;
  const PlanningContext ctx(t, testsupport::default_manifold(), kParams, kTires, c);
  const FullState s0{{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}};
  const auto plan = search(s0, ctx);
  StopCondition stop;
  stop.max_cycles = 1;
  const auto run = replan_loop(s0, ctx, stop);
  REQUIRE(run.cycles.size() == 1);
  REQUIRE(run.log.size() == static_cast<std::size_t>(c.k_hor * c.substeps + 1));
  std::size_t i = 1;
  for (const auto& st : plan.steps) {
    for (std::size_t j = 1; j < st.primitive.samples.size(); ++j, ++i) {
      CHECK(run.log[i].state.pose.x == st.primitive.samples[j].pose.x);
      CHECK(run.log[i].state.dyn.v == st.primitive.samples[j].dyn.v);
      CHECK(run.log[i].t == doctest::Approx(static_cast<double>(i) * c.dt()));
    }
  }
  CHECK(run.log.back().s_total == doctest::Approx(plan.progress()).epsilon(1e-9));
}

TEST_CASE("replanning log is continuous") {
  const track::Track t(track::uturn_waypoints(15.0, 30.0, 80.0), 10.0, false);
  PlannerConfig c = default_planner_config();
  c.k_hor = 6;
  const PlanningContext ctx(t, testsupport::default_manifold(), kParams, kTires, c);
  StopCondition stop;
  stop.max_cycles = 4;
  const auto run = replan_loop({{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}}, ctx, stop);
  REQUIRE(run.cycles.size() == 4);
  CHECK(run.log.size() == static_cast<std::size_t>(4 * std::llround(c.T_rep / c.dt()) + 1));
  for (std::size_t i = 1; i < run.log.size(); ++i) {
    const auto& a = run.log[i - 1].state;
    const auto& b = run.log[i].state;
    CHECK(std::hypot(b.pose.x - a.pose.x, b.pose.y - a.pose.y) <= (a.dyn.v + 1.0) * c.dt());
    CHECK(std::abs(b.dyn.v - a.dyn.v) < c.a_max * c.T_s);
  }
}

TEST_CASE("root expansion fully pruned") {
  const track::Track t(track::straight_waypoints(100.0), 10.0, false);
  const PlanningContext ctx(t, testsupport::default_manifold(), kParams, kTires, default_planner_config());
  // Sliding sideways towards the edge at speed: every primitive leaves the road.
  CHECK_THROWS_AS(search({{20.0, 3.9, 1.2}, {15.0, 0.0, 0.0}}, ctx), NoFeasibleNodeError);
  CHECK_THROWS_AS(search({{20.0, 300.0, 0.0}, {8.0, 0.0, 0.0}}, ctx), ProjectionError);
}
