#pragma once

#include <array>
#include <span>
#include <vector>

namespace driftplan::esm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<int, 3>;  // counter-clockwise vertex indices

// Bowyer-Watson Delaunay triangulation of scattered points. Duplicate points
// are triangulated once (the first occurrence wins). Fewer than three
// non-collinear points yield an empty result.
std::vector<Triangle> delaunay_triangulate(std::span<const Point2> pts);

}  // namespace driftplan::esm
