#include "driftplan/esm/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace driftplan::esm {

namespace {

long double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
         (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

// > 0 when d lies strictly inside the circumcircle of the CCW triangle abc.
long double in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

}  // namespace

std::vector<Triangle> delaunay_triangulate(std::span<const Point2> input) {
  const int n = static_cast<int>(input.size());
  if (n < 3) return {};

  // Work in a unit box so the super-triangle does not swamp the precision.
  double xmin = input[0].x, xmax = input[0].x, ymin = input[0].y, ymax = input[0].y;
  for (const auto& p : input) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
  std::vector<Point2> pts;
  pts.reserve(n + 3);
  for (const auto& p : input) pts.push_back({(p.x - xmin) / span, (p.y - ymin) / span});
  // Far enough out that no hull edge of the unit box is cut off.
  pts.push_back({-1e4, -1e4});
  pts.push_back({1e4 + 1.0, -1e4});
  pts.push_back({0.5, 1e4 + 1.0});

  std::vector<Triangle> tris{{n, n + 1, n + 2}};
  std::map<std::pair<double, double>, int> seen;

  for (int i = 0; i < n; ++i) {
    if (!seen.emplace(std::make_pair(pts[i].x, pts[i].y), i).second) continue;
    const Point2& p = pts[i];

    std::vector<Triangle> keep;
    std::map<std::pair<int, int>, int> edges;  // undirected edge -> use count
    std::vector<std::pair<int, int>> order;    // directed edges in discovery order
    keep.reserve(tris.size() + 2);
    for (const auto& t : tris) {
      if (in_circle(pts[t[0]], pts[t[1]], pts[t[2]], p) > 0) {
        for (int e = 0; e < 3; ++e) {
          const int a = t[e], b = t[(e + 1) % 3];
          const auto key = std::minmax(a, b);
          if (edges[key]++ == 0) order.emplace_back(a, b);
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [a, b] : order) {
      if (edges[std::minmax(a, b)] != 1) continue;
      Triangle t{a, b, i};
      if (orient(pts[a], pts[b], p) < 0) std::swap(t[0], t[1]);
      if (orient(pts[t[0]], pts[t[1]], pts[t[2]]) != 0) keep.push_back(t);
    }
    tris = std::move(keep);
  }

  std::vector<Triangle> out;
  for (const auto& t : tris) {
    if (t[0] < n && t[1] < n && t[2] < n) out.push_back(t);
  }
  return out;
}

}  // namespace driftplan::esm
