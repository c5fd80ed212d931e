#pragma once

#include <filesystem>
#include <string>

#include "driftplan/esm/manifold.hpp"
#include "driftplan/esm/sweep.hpp"
#include "driftplan/vehicle/types.hpp"

namespace testsupport {

// Manifold of the default gravel parameters, built once per process.
inline const driftplan::esm::Manifold& default_manifold() {
  using namespace driftplan;
  static const esm::Manifold m = [] {
    const vehicle::VehicleParams p;
    const vehicle::TireParams t;
    const auto sweep = esm::sweep_inputs(esm::SweepGrid{}, p, t);
    return esm::build_manifold(sweep.points(), esm::DomainFilter{}, esm::parameter_hash(p, t));
  }();
  return m;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("driftplan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
