#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftplan/esm/delaunay.hpp"
#include "driftplan/esm/equilibrium.hpp"

namespace driftplan::esm {

// One equilibrium stored in the manifold, counter-clockwise sense (psidot > 0).
struct ManifoldSample {
  double beta = 0.0;
  double psidot = 0.0;
  double v = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double radius = 0.0;
  bool unstable = false;

  bool operator==(const ManifoldSample&) const = default;
};

// Which equilibria and triangles make up the queryable domain.
struct DomainFilter {
  double r_min = 10.0;        // m, minimum reachable curvature radius
  double r_max = 100.0;       // m, beyond this the bicycle expansion takes over
  double v_max = 20.0;        // m/s
  double beta_margin = 0.05;  // rad, beta*psidot > 0 kept only for |beta| below this
  double max_edge = 0.12;     // longest triangle edge in the (beta [rad], psidot [rad/s]) plane

  bool operator==(const DomainFilter&) const = default;
};

enum class Sense { kCounterClockwise, kClockwise };

struct ManifoldValue {
  double v = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double radius = 0.0;  // vertex-interpolated, signed like psidot
  int triangle = -1;
  Sense sense = Sense::kCounterClockwise;
};

// Piecewise-linear maps v, delta, lambda over a triangulated domain of the
// (beta, psidot) plane. Only the counter-clockwise half is stored; queries
// with psidot < 0 are answered through the mirror image (beta, psidot, delta
// negated). Immutable after construction.
class Manifold {
 public:
  Manifold() = default;
  Manifold(std::vector<ManifoldSample> samples, std::vector<Triangle> triangles, DomainFilter filter,
           std::uint64_t param_hash);

  // Returns nullopt outside the domain.
  std::optional<ManifoldValue> query(double beta, double psidot) const;

  const std::vector<ManifoldSample>& samples() const { return samples_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const DomainFilter& filter() const { return filter_; }
  std::uint64_t param_hash() const { return param_hash_; }
  bool empty() const { return triangles_.empty(); }

  bool operator==(const Manifold& o) const {
    return samples_ == o.samples_ && triangles_ == o.triangles_ && filter_ == o.filter_ &&
           param_hash_ == o.param_hash_;
  }

 private:
  std::optional<ManifoldValue> query_ccw(double beta, double psidot) const;
  void build_index();

  std::vector<ManifoldSample> samples_;
  std::vector<Triangle> triangles_;
  DomainFilter filter_;
  std::uint64_t param_hash_ = 0;

  // Uniform bucket grid over the bounding box for point location.
  double bx0_ = 0.0, by0_ = 0.0, bdx_ = 1.0, bdy_ = 1.0;
  int bnx_ = 0, bny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

// True when the equilibrium passes the vertex rules of the filter
// (turning sense, radius window, speed cap, same-sign margin).
bool in_domain(const ManifoldSample& s, const DomainFilter& filter);

ManifoldSample to_sample(const EquilibriumPoint& eq);

// Triangulates the counter-clockwise points that pass the filter and drops
// triangles with an edge longer than filter.max_edge. Samples not used by
// any remaining triangle are discarded. Clockwise points are ignored (they
// are the mirror image). Throws InsufficientPointsError when fewer than three
// non-collinear points survive.
Manifold build_manifold(std::span<const EquilibriumPoint> points, const DomainFilter& filter,
                        std::uint64_t param_hash);

// Stable 64-bit hash of the vehicle and tire parameters.
std::uint64_t parameter_hash(const VehicleParams& p, const TireParams& tires);

struct LoadResult {
  Manifold manifold;
  std::vector<std::string> warnings;
};

void save_manifold(const Manifold& m, const std::filesystem::path& path);
std::string serialize_manifold(const Manifold& m);

// Throws IoError or ParseError. A hash that differs from expected_hash is a
// warning, not an error.
LoadResult load_manifold(const std::filesystem::path& path, std::optional<std::uint64_t> expected_hash = {});
LoadResult parse_manifold(const std::string& text, std::optional<std::uint64_t> expected_hash = {});

}  // namespace driftplan::esm
