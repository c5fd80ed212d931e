#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "driftplan/planner/replan.hpp"
#include "driftplan/track/track.hpp"

namespace driftplan::harness {

// Time span of the log with |beta| above the drift threshold.
struct DriftInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  double peak_beta = 0.0;  // signed beta of largest magnitude inside the span
};

struct LapMetrics {
  bool completed = false;
  double lap_time = 0.0;         // [s] time of the last logged sample
  double total_s = 0.0;          // [m] unwrapped progress
  double max_abs_beta = 0.0;     // [rad]
  std::vector<DriftInterval> drift;
  double min_edge_margin = 0.0;  // [m] width/2 - |d|, over the whole log
  double max_dv_step = 0.0;      // [m/s] largest |dv| between consecutive samples
  std::vector<double> cycle_wall_time;          // [s]
  std::vector<std::size_t> cycle_expansions;
  std::size_t total_expansions = 0;
};

// An empty log (nothing executed) gives zeroed metrics.
LapMetrics compute_lap_metrics(const planner::ReplanResult& run, const track::Track& track, double drift_threshold);

// Wall times are nondeterministic and only included on request.
nlohmann::json to_json(const LapMetrics& m, bool with_timing);

}  // namespace driftplan::harness
