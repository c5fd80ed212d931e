#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "driftplan/esm/manifold.hpp"
#include "driftplan/esm/sweep.hpp"
#include "driftplan/planner/config.hpp"
#include "driftplan/vehicle/types.hpp"

namespace driftplan::harness {

struct InitialState {
  // Pose defaults to the start of the centerline when unset.
  std::optional<double> x, y, psi;
  double v = 8.0;
  double beta = 0.0;
  double psidot = 0.0;
};

struct RunConfig {
  std::filesystem::path source;  // the file this was read from, empty when built in code
  std::filesystem::path track_path;
  std::filesystem::path manifold_path;
  std::filesystem::path params_path;  // optional [vehicle]/[tire] file
  std::filesystem::path out_dir = "out";

  vehicle::VehicleParams vehicle;
  vehicle::TireParams tires;
  esm::SweepGrid sweep;
  esm::SweepOptions sweep_options;
  esm::DomainFilter domain;
  planner::PlannerConfig planner = planner::default_planner_config();
  InitialState initial;

  int laps = 1;
  int max_cycles = 2000;
  double drift_threshold = 0.4;  // rad
  bool plots = false;

  // Stable digest of the resolved settings that affect results (not of the
  // file text): file locations and the plots flag are left out.
  std::uint64_t hash() const;
  // One `section.key = value` line per resolved setting.
  std::string canonical() const;
};

// Reads an INI file. Relative paths inside it are taken relative to the
// file's directory. Unknown sections or keys, malformed numbers and
// out-of-range values raise ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});

// Throws ConfigError when a file the command reads does not exist.
enum class Command { kEsmBuild, kEsmShow, kPlan, kLap };
void require_inputs(const RunConfig& cfg, Command cmd);

}  // namespace driftplan::harness
