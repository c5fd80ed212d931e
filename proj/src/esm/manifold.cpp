#include "driftplan/esm/manifold.hpp"

#include <algorithm>
#include <cmath>

#include "driftplan/error.hpp"
#include "driftplan/text.hpp"

namespace driftplan::esm {

namespace {

constexpr int kBucketsPerAxis = 64;
constexpr double kBaryTol = 1e-12;

double edge_length(const ManifoldSample& a, const ManifoldSample& b) {
  return std::hypot(a.beta - b.beta, a.psidot - b.psidot);
}

}  // namespace

ManifoldSample to_sample(const EquilibriumPoint& eq) {
  return {eq.dyn.beta, eq.dyn.psidot, eq.dyn.v, eq.input.delta, eq.input.lambda, eq.radius, eq.open_loop_unstable};
}

bool in_domain(const ManifoldSample& s, const DomainFilter& f) {
  if (!(s.psidot > 0.0)) return false;
  if (!(s.radius >= f.r_min) || !(s.radius <= f.r_max)) return false;
  if (!(s.v <= f.v_max)) return false;
  if (s.beta * s.psidot > 0.0 && !(std::abs(s.beta) < f.beta_margin)) return false;
  return true;
}

Manifold::Manifold(std::vector<ManifoldSample> samples, std::vector<Triangle> triangles, DomainFilter filter,
                   std::uint64_t param_hash)
    : samples_(std::move(samples)), triangles_(std::move(triangles)), filter_(filter), param_hash_(param_hash) {
  for (const auto& t : triangles_) {
    for (int v : t) {
      if (v < 0 || static_cast<std::size_t>(v) >= samples_.size()) {
        throw InsufficientPointsError("manifold: triangle references a missing sample");
      }
    }
  }
  build_index();
}

void Manifold::build_index() {
  buckets_.clear();
  if (samples_.empty() || triangles_.empty()) return;
  double x0 = samples_[0].beta, x1 = x0, y0 = samples_[0].psidot, y1 = y0;
  for (const auto& s : samples_) {
    x0 = std::min(x0, s.beta);
    x1 = std::max(x1, s.beta);
    y0 = std::min(y0, s.psidot);
    y1 = std::max(y1, s.psidot);
  }
  bnx_ = bny_ = kBucketsPerAxis;
  bx0_ = x0;
  by0_ = y0;
  bdx_ = std::max((x1 - x0) / bnx_, 1e-12);
  bdy_ = std::max((y1 - y0) / bny_, 1e-12);
  buckets_.assign(static_cast<std::size_t>(bnx_ * bny_), {});
  auto clamp_x = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - bx0_) / bdx_)), 0, bnx_ - 1); };
  auto clamp_y = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - by0_) / bdy_)), 0, bny_ - 1); };
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& a = samples_[triangles_[t][0]];
    const auto& b = samples_[triangles_[t][1]];
    const auto& c = samples_[triangles_[t][2]];
    const int ix0 = clamp_x(std::min({a.beta, b.beta, c.beta}));
    const int ix1 = clamp_x(std::max({a.beta, b.beta, c.beta}));
    const int iy0 = clamp_y(std::min({a.psidot, b.psidot, c.psidot}));
    const int iy1 = clamp_y(std::max({a.psidot, b.psidot, c.psidot}));
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) buckets_[static_cast<std::size_t>(iy * bnx_ + ix)].push_back(static_cast<int>(t));
    }
  }
}

std::optional<ManifoldValue> Manifold::query(double beta, double psidot) const {
  if (!std::isfinite(beta) || !std::isfinite(psidot)) return std::nullopt;
  if (psidot < 0.0) {
    auto r = query_ccw(-beta, -psidot);
    if (!r) return std::nullopt;
    r->delta = -r->delta;
    r->radius = -r->radius;
    r->sense = Sense::kClockwise;
    return r;
  }
  return query_ccw(beta, psidot);
}

std::optional<ManifoldValue> Manifold::query_ccw(double beta, double psidot) const {
  if (buckets_.empty()) return std::nullopt;
  const double fx = (beta - bx0_) / bdx_;
  const double fy = (psidot - by0_) / bdy_;
  // Points on the bounding-box edge still belong to the last bucket.
  if (fx < -1e-9 || fy < -1e-9 || fx > bnx_ + 1e-9 || fy > bny_ + 1e-9) return std::nullopt;
  const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, bnx_ - 1);
  const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, bny_ - 1);

  for (int t : buckets_[static_cast<std::size_t>(iy * bnx_ + ix)]) {
    const auto& tri = triangles_[static_cast<std::size_t>(t)];
    const ManifoldSample* s[3] = {&samples_[tri[0]], &samples_[tri[1]], &samples_[tri[2]]};
    for (const auto* v : s) {
      if (v->beta == beta && v->psidot == psidot) {
        return ManifoldValue{v->v, v->delta, v->lambda, v->radius, t, Sense::kCounterClockwise};
      }
    }
    const double x1 = s[0]->beta, y1 = s[0]->psidot;
    const double x2 = s[1]->beta, y2 = s[1]->psidot;
    const double x3 = s[2]->beta, y3 = s[2]->psidot;
    const double det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3);
    if (det == 0.0) continue;
    const double w1 = ((y2 - y3) * (beta - x3) + (x3 - x2) * (psidot - y3)) / det;
    const double w2 = ((y3 - y1) * (beta - x3) + (x1 - x3) * (psidot - y3)) / det;
    const double w3 = 1.0 - w1 - w2;
    if (w1 < -kBaryTol || w2 < -kBaryTol || w3 < -kBaryTol) continue;
    ManifoldValue out;
    out.v = w1 * s[0]->v + w2 * s[1]->v + w3 * s[2]->v;
    out.delta = w1 * s[0]->delta + w2 * s[1]->delta + w3 * s[2]->delta;
    out.lambda = w1 * s[0]->lambda + w2 * s[1]->lambda + w3 * s[2]->lambda;
    out.radius = w1 * s[0]->radius + w2 * s[1]->radius + w3 * s[2]->radius;
    out.triangle = t;
    return out;
  }
  return std::nullopt;
}

Manifold build_manifold(std::span<const EquilibriumPoint> points, const DomainFilter& filter,
                        std::uint64_t param_hash) {
  std::vector<ManifoldSample> kept;
  for (const auto& eq : points) {
    const ManifoldSample s = to_sample(eq);
    if (in_domain(s, filter)) kept.push_back(s);
  }
  if (kept.size() < 3) throw InsufficientPointsError("build_manifold: fewer than three in-domain equilibria");

  std::vector<Point2> xy;
  xy.reserve(kept.size());
  for (const auto& s : kept) xy.push_back({s.beta, s.psidot});
  const std::vector<Triangle> all = delaunay_triangulate(xy);

  std::vector<Triangle> good;
  for (const auto& t : all) {
    const auto& a = kept[t[0]];
    const auto& b = kept[t[1]];
    const auto& c = kept[t[2]];
    if (std::max({edge_length(a, b), edge_length(b, c), edge_length(c, a)}) > filter.max_edge) continue;
    good.push_back(t);
  }
  if (good.empty()) throw InsufficientPointsError("build_manifold: no triangle survives the edge filter");

  // Compact: keep only referenced samples, in their original order.
  std::vector<int> remap(kept.size(), -1);
  for (const auto& t : good) {
    for (int v : t) remap[v] = 0;
  }
  std::vector<ManifoldSample> samples;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (remap[i] == 0) {
      remap[i] = static_cast<int>(samples.size());
      samples.push_back(kept[i]);
    }
  }
  for (auto& t : good) {
    for (int& v : t) v = remap[v];
  }
  return Manifold(std::move(samples), std::move(good), filter, param_hash);
}

std::uint64_t parameter_hash(const VehicleParams& p, const TireParams& t) {
  using text::exact;
  const std::string canon = "m=" + exact(p.m) + ";J_z=" + exact(p.J_z) + ";l_f=" + exact(p.l_f) +
                            ";l_r=" + exact(p.l_r) + ";h=" + exact(p.h) + ";C_f=" + exact(p.C_f) +
                            ";C_r=" + exact(p.C_r) + ";C_x=" + exact(p.C_x) + ";v_max=" + exact(p.v_max) +
                            ";a_max=" + exact(p.a_max) + ";g=" + exact(p.g) + ";B=" + exact(t.B) +
                            ";C=" + exact(t.C) + ";D=" + exact(t.D) + ";E=" + exact(t.E);
  return text::fnv1a(canon);
}

}  // namespace driftplan::esm
