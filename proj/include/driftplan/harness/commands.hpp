#pragma once

#include <ostream>

#include "driftplan/harness/config.hpp"
#include "driftplan/harness/metrics.hpp"

namespace driftplan::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFailure = 2;

// Each command writes its files under cfg.out_dir (created if missing) and a
// short summary to `log`. Errors propagate as exceptions; exit_code_for maps
// them.
int cmd_esm_build(const RunConfig& cfg, std::ostream& log);
int cmd_esm_show(const RunConfig& cfg, std::ostream& log);
int cmd_plan(const RunConfig& cfg, std::ostream& log);
int cmd_lap(const RunConfig& cfg, std::ostream& log, LapMetrics* metrics = nullptr);

// 1 for configuration and input-file problems, 2 for everything else.
int exit_code_for(const std::exception& e);

// Initial state with the pose filled in from the track start when unset.
vehicle::FullState initial_state(const RunConfig& cfg, const track::Track& track);

}  // namespace driftplan::harness
