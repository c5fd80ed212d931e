#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "driftplan/planner/search.hpp"

namespace driftplan::planner {

struct LogSample {
  double t = 0.0;
  FullState state;
  ControlInput input;
  Mode mode = Mode::kBicycle;
  double s = 0.0;        // modular arc length
  double d = 0.0;
  double s_total = 0.0;  // unwrapped progress since the start [m]
};

struct CycleRecord {
  int cycle = 0;
  double t_start = 0.0;
  int depth = 0;             // primitives in the plan
  double planned_progress = 0.0;
  SearchStats stats;
};

struct StopCondition {
  double progress = std::numeric_limits<double>::infinity();  // stop once s_total reaches this [m]
  int max_cycles = std::numeric_limits<int>::max();
};

struct ReplanResult {
  std::vector<LogSample> log;
  std::vector<CycleRecord> cycles;
  bool completed = false;   // stop condition reached
  bool starved = false;     // a search returned nothing usable
  std::string failure;
};

// Receding-horizon loop with perfect actuation. Each plan is executed for
// T_rep; the next plan starts from the state the current plan reaches at
// T_rep, computed (in wall-clock terms) T_plan before it is needed. The log
// holds every executed sample, dt = T_s / substeps apart, starting with the
// initial state. `on_plan` sees each search result before it is executed.
ReplanResult replan_loop(const FullState& initial, const PlanningContext& ctx, const StopCondition& stop,
                         const std::function<void(int, const SearchResult&)>& on_plan = {});

}  // namespace driftplan::planner
