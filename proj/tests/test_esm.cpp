#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "driftplan/error.hpp"
#include "driftplan/esm/delaunay.hpp"
#include "driftplan/esm/equilibrium.hpp"
#include "driftplan/esm/manifold.hpp"
#include "driftplan/esm/sweep.hpp"
#include "driftplan/vehicle/dynamics.hpp"

using namespace driftplan;
using namespace driftplan::esm;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SweepGrid small_grid() {
  SweepGrid g;
  g.delta_min = -8 * kDeg;
  g.delta_max = 8 * kDeg;
  g.delta_step = 2 * kDeg;
  g.lambda_min = 0.0;
  g.lambda_max = 0.3;
  g.lambda_step = 0.05;
  return g;
}

const SweepResult& small_sweep() {
  static const SweepResult r = sweep_inputs(small_grid(), {}, {});
  return r;
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double hull_area(std::vector<Point2> p) {
  std::sort(p.begin(), p.end(), [](auto& a, auto& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Point2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  double a = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& u = h[i];
    const auto& w = h[(i + 1) % h.size()];
    a += u.x * w.y - w.x * u.y;
  }
  return a / 2.0;
}

// Grid of synthetic samples with v, delta, lambda linear in (beta, psidot).
Manifold linear_manifold() {
  std::vector<ManifoldSample> s;
  const int nb = 6, nr = 5;
  for (int j = 0; j < nr; ++j) {
    for (int i = 0; i < nb; ++i) {
      ManifoldSample m;
      m.beta = -0.5 + 0.1 * i;
      m.psidot = 0.2 + 0.1 * j;
      m.v = 3.0 + 2.0 * m.beta + 10.0 * m.psidot;
      m.delta = 0.1 - 0.3 * m.beta;
      m.lambda = 0.05 + 0.2 * m.psidot;
      m.radius = m.v / m.psidot;
      s.push_back(m);
    }
  }
  std::vector<Triangle> t;
  for (int j = 0; j + 1 < nr; ++j) {
    for (int i = 0; i + 1 < nb; ++i) {
      const int a = j * nb + i, b = a + 1, c = a + nb, d = c + 1;
      t.push_back({a, b, d});
      t.push_back({a, d, c});
    }
  }
  return Manifold(s, t, DomainFilter{}, 42);
}

}  // namespace

TEST_CASE("sweep equilibria satisfy the balance equations") {
  const vehicle::VehicleParams p;
  const vehicle::TireParams t;
  const SweepResult& r = small_sweep();
  CHECK(r.convergence_rate() >= 0.9);
  CHECK(r.degenerate_count() == 1);
  int checked = 0;
  for (const auto& eq : r.points()) {
    const auto d = vehicle::full_model_derivatives(eq.dyn, eq.input, p, t);
    const double res = std::max({std::abs(d.vdot), std::abs(d.betadot), std::abs(d.psiddot)});
    CHECK(res < 1e-8);
    CHECK(eq.residual == doctest::Approx(res).scale(1e-12));
    CHECK(eq.radius == doctest::Approx(eq.dyn.v / eq.dyn.psidot));
    // Frozen-input rollout from the equilibrium stays put.
    if (!eq.open_loop_unstable) {
      const auto traj = vehicle::rollout_dynamics(eq.dyn, eq.input, 5.0, 500, vehicle::Model::kFull, p, t);
      double drift = 0.0;
      for (const auto& s : traj) {
        drift = std::max({drift, std::abs(s.v - eq.dyn.v), std::abs(s.beta - eq.dyn.beta),
                          std::abs(s.psidot - eq.dyn.psidot)});
      }
      CHECK(drift < 1e-3);
    }
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("mirrored inputs give mirrored equilibria") {
  int pairs = 0;
  const double mismatch = mirror_mismatch(small_sweep(), &pairs);
  CHECK(pairs > 20);
  CHECK(mismatch < 1e-6);

  EquilibriumPoint e;
  e.dyn = {10.0, -0.3, 0.5};
  e.input = {0.1, 0.2};
  e.radius = 20.0;
  const EquilibriumPoint m = mirror(e);
  CHECK(m.dyn.v == 10.0);
  CHECK(m.dyn.beta == 0.3);
  CHECK(m.dyn.psidot == -0.5);
  CHECK(m.input.delta == -0.1);
  CHECK(m.input.lambda == 0.2);
  CHECK(m.radius == -20.0);
}

TEST_CASE("equilibrium solver errors") {
  const vehicle::VehicleParams p;
  const vehicle::TireParams t;
  CHECK_THROWS_AS(solve_equilibrium({0.0, 0.0}, p, t, {10.0, 0.0, 0.0}), DegenerateInputError);

  // Continuation guess from a converged neighbour reproduces that cell.
  const SweepResult& r = small_sweep();
  const SweepCell& c = r.cell(6, 2);
  REQUIRE(c.point.has_value());
  const EquilibriumPoint again = solve_equilibrium(c.input, p, t, c.point->dyn);
  CHECK(again.dyn.v == doctest::Approx(c.point->dyn.v).epsilon(1e-9));
  CHECK(again.residual < 1e-8);
}

TEST_CASE("empty sweep range") {
  SweepGrid g = small_grid();
  g.lambda_min = 0.5;
  g.lambda_max = 0.4;
  CHECK(g.lambda_count() == 0);
  CHECK_THROWS_AS(sweep_inputs(g, {}, {}), EmptySweepError);
}

TEST_CASE("delaunay: empty circumcircles and hull coverage") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point2> pts;
  for (int i = 0; i < 150; ++i) pts.push_back({u(rng), u(rng)});
  const auto tris = delaunay_triangulate(pts);
  REQUIRE(!tris.empty());
  double area = 0.0;
  for (const auto& t : tris) {
    const Point2 &a = pts[t[0]], &b = pts[t[1]], &c = pts[t[2]];
    const double tw = cross(a, b, c);
    CHECK(tw > 0.0);
    area += tw / 2.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (int(k) == t[0] || int(k) == t[1] || int(k) == t[2]) continue;
      const Point2& d = pts[k];
      const double ax = a.x - d.x, ay = a.y - d.y, bx = b.x - d.x, by = b.y - d.y, cx = c.x - d.x, cy = c.y - d.y;
      const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                         (cx * cx + cy * cy) * (ax * by - bx * ay);
      CHECK(det <= 1e-12);
    }
  }
  CHECK(area == doctest::Approx(hull_area(pts)).epsilon(1e-10));
  // Euler: a triangulation of n points with h on the hull has 2n - 2 - h triangles.
  CHECK(tris.size() <= 2 * pts.size());
}

TEST_CASE("delaunay degenerate input") {
  const std::vector<Point2> line = {{0, 0}, {1, 1}, {2, 2}};
  CHECK(delaunay_triangulate(line).empty());
  const std::vector<Point2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {1, 1}};
  CHECK(delaunay_triangulate(square).size() == 2);
}

TEST_CASE("manifold interpolation is exact for linear data") {
  const Manifold m = linear_manifold();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> b(-0.5, 0.0), r(0.2, 0.6);
  for (int i = 0; i < 300; ++i) {
    const double beta = b(rng), psidot = r(rng);
    const auto q = m.query(beta, psidot);
    REQUIRE(q.has_value());
    CHECK(q->v == doctest::Approx(3.0 + 2.0 * beta + 10.0 * psidot).epsilon(1e-12));
    CHECK(q->delta == doctest::Approx(0.1 - 0.3 * beta).epsilon(1e-12));
    CHECK(q->lambda == doctest::Approx(0.05 + 0.2 * psidot).epsilon(1e-12));
    CHECK(q->sense == Sense::kCounterClockwise);

    const auto qm = m.query(-beta, -psidot);
    REQUIRE(qm.has_value());
    CHECK(qm->v == doctest::Approx(q->v).epsilon(1e-14));
    CHECK(qm->delta == doctest::Approx(-q->delta).epsilon(1e-14));
    CHECK(qm->lambda == doctest::Approx(q->lambda).epsilon(1e-14));
    CHECK(qm->radius == doctest::Approx(-q->radius).epsilon(1e-14));
    CHECK(qm->sense == Sense::kClockwise);
  }
  CHECK_FALSE(m.query(0.2, 0.3).has_value());
  CHECK_FALSE(m.query(-0.2, 0.9).has_value());
  CHECK_FALSE(m.query(-0.2, 0.0).has_value());

  // Vertices return their own values.
  for (const auto& s : m.samples()) {
    const auto q = m.query(s.beta, s.psidot);
    REQUIRE(q.has_value());
    CHECK(q->v == doctest::Approx(s.v).epsilon(1e-12));
  }
}

TEST_CASE("domain rules") {
  const DomainFilter f;
  ManifoldSample s;
  s.beta = -0.3;
  s.psidot = 0.5;
  s.v = 8.0;
  s.radius = 16.0;
  CHECK(in_domain(s, f));
  s.radius = 9.0;
  CHECK_FALSE(in_domain(s, f));
  s.radius = 16.0;
  s.v = 25.0;
  CHECK_FALSE(in_domain(s, f));
  s.v = 8.0;
  s.beta = 0.04;
  CHECK(in_domain(s, f));
  s.beta = 0.2;
  CHECK_FALSE(in_domain(s, f));
  s.beta = -0.3;
  s.psidot = -0.5;
  s.radius = -16.0;
  CHECK_FALSE(in_domain(s, f));
}

TEST_CASE("manifold built from the sweep") {
  const vehicle::VehicleParams p;
  const vehicle::TireParams t;
  const auto pts = small_sweep().points();
  const Manifold m = build_manifold(pts, DomainFilter{}, parameter_hash(p, t));
  REQUIRE_FALSE(m.empty());
  for (const auto& s : m.samples()) {
    CHECK(s.psidot > 0.0);
    CHECK(s.radius >= 10.0);
    CHECK(in_domain(s, m.filter()));
  }
  for (const auto& tri : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const auto& a = m.samples()[tri[k]];
      const auto& b = m.samples()[tri[(k + 1) % 3]];
      CHECK(std::hypot(a.beta - b.beta, a.psidot - b.psidot) <= m.filter().max_edge + 1e-12);
    }
  }
  CHECK_THROWS_AS(build_manifold(std::span<const EquilibriumPoint>(pts.data(), 2), DomainFilter{}, 0),
                  InsufficientPointsError);
}

TEST_CASE("manifold file round trip") {
  const Manifold m = linear_manifold();
  const std::string text = serialize_manifold(m);
  const LoadResult back = parse_manifold(text, 42);
  CHECK(back.warnings.empty());
  CHECK(back.manifold == m);
  CHECK(serialize_manifold(back.manifold) == text);

  const LoadResult other = parse_manifold(text, 43);
  CHECK(other.warnings.size() == 1);

  CHECK_THROWS_AS(parse_manifold("garbage\n"), ParseError);
  std::string broken = text;
  broken.resize(broken.size() / 2);
  CHECK_THROWS_AS(parse_manifold(broken), ParseError);
  CHECK_THROWS_AS(load_manifold("/nonexistent/dir/file.esm"), IoError);
}

TEST_CASE("parameter hash") {
  vehicle::VehicleParams p;
  vehicle::TireParams t;
  const auto h = parameter_hash(p, t);
  CHECK(parameter_hash(p, t) == h);
  p.m += 1.0;
  CHECK(parameter_hash(p, t) != h);
}
