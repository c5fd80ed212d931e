#include "driftplan/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace driftplan::harness {

LapMetrics compute_lap_metrics(const planner::ReplanResult& run, const track::Track& track, double drift_threshold) {
  LapMetrics m;
  m.completed = run.completed;
  for (const auto& c : run.cycles) {
    m.cycle_wall_time.push_back(c.stats.wall_time);
    m.cycle_expansions.push_back(c.stats.expansions);
    m.total_expansions += c.stats.expansions;
  }
  if (run.log.size() < 2) return m;

  const double half = 0.5 * track.width();
  m.lap_time = run.log.back().t - run.log.front().t;
  m.total_s = run.log.back().s_total;
  m.min_edge_margin = half - std::abs(run.log.front().d);

  bool open = false;
  DriftInterval cur;
  for (std::size_t i = 0; i < run.log.size(); ++i) {
    const auto& ls = run.log[i];
    const double beta = ls.state.dyn.beta;
    m.max_abs_beta = std::max(m.max_abs_beta, std::abs(beta));
    m.min_edge_margin = std::min(m.min_edge_margin, half - std::abs(ls.d));
    if (i > 0) m.max_dv_step = std::max(m.max_dv_step, std::abs(ls.state.dyn.v - run.log[i - 1].state.dyn.v));

    if (std::abs(beta) > drift_threshold) {
      if (!open) {
        cur = {ls.t, ls.t, beta};
        open = true;
      }
      cur.t_end = ls.t;
      if (std::abs(beta) > std::abs(cur.peak_beta)) cur.peak_beta = beta;
    } else if (open) {
      m.drift.push_back(cur);
      open = false;
    }
  }
  if (open) m.drift.push_back(cur);
  return m;
}

nlohmann::json to_json(const LapMetrics& m, bool with_timing) {
  nlohmann::json j;
  j["completed"] = m.completed;
  j["lap_time"] = m.lap_time;
  j["total_s"] = m.total_s;
  j["max_abs_beta"] = m.max_abs_beta;
  j["min_edge_margin"] = m.min_edge_margin;
  j["max_dv_step"] = m.max_dv_step;
  j["drift_intervals"] = nlohmann::json::array();
  for (const auto& d : m.drift) {
    j["drift_intervals"].push_back({{"t_begin", d.t_begin}, {"t_end", d.t_end}, {"peak_beta", d.peak_beta}});
  }
  j["cycle_expansions"] = m.cycle_expansions;
  j["total_expansions"] = m.total_expansions;
  if (with_timing) j["cycle_wall_time"] = m.cycle_wall_time;
  return j;
}

}  // namespace driftplan::harness
