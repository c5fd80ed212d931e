#include "driftplan/planner/replan.hpp"

#include <cmath>

#include "driftplan/error.hpp"

namespace driftplan::planner {

ReplanResult replan_loop(const FullState& initial, const PlanningContext& ctx, const StopCondition& stop,
                         const std::function<void(int, const SearchResult&)>& on_plan) {
  const PlannerConfig& c = ctx.config;
  const double dt = c.dt();
  const auto per_cycle = static_cast<std::size_t>(std::llround(c.T_rep / dt));

  ReplanResult out;
  LogSample first;
  first.state = initial;
  first.state.pose.psi = vehicle::wrap_angle(initial.pose.psi);
  const track::FrenetPose fp0 = ctx.track.to_frenet(track::Point{initial.pose.x, initial.pose.y});
  first.s = fp0.s;
  first.d = fp0.d;
  first.mode = bicycle_region(initial.dyn, c) ? Mode::kBicycle : Mode::kEsm;
  out.log.push_back(first);
  if (stop.progress <= 0.0) {
    out.completed = true;
    return out;
  }

  FullState state = first.state;
  for (int cycle = 0; cycle < stop.max_cycles; ++cycle) {
    SearchResult plan;
    try {
      plan = search(state, ctx);
    } catch (const NoFeasibleNodeError& e) {
      out.starved = true;
      out.failure = e.what();
      return out;
    }
    CycleRecord rec;
    rec.cycle = cycle;
    rec.t_start = out.log.back().t;
    rec.depth = static_cast<int>(plan.steps.size());
    rec.planned_progress = plan.progress();
    rec.stats = plan.stats;
    out.cycles.push_back(rec);
    if (on_plan) on_plan(cycle, plan);
    if (plan.steps.empty()) {
      out.starved = true;
      out.failure = "search returned an empty plan";
      return out;
    }

    std::size_t executed = 0;
    for (const PlanStep& step : plan.steps) {
      for (std::size_t j = 1; j < step.primitive.samples.size() && executed < per_cycle; ++j, ++executed) {
        const LogSample& prev = out.log.back();
        LogSample ls;
        ls.t = out.log.front().t + static_cast<double>(out.log.size()) * dt;
        ls.state = step.primitive.samples[j];
        ls.state.pose.psi = vehicle::wrap_angle(ls.state.pose.psi);
        ls.input = step.primitive.input;
        ls.mode = step.primitive.mode;
        const track::FrenetPose fp = ctx.track.to_frenet(track::Point{ls.state.pose.x, ls.state.pose.y}, prev.s);
        ls.s = fp.s;
        ls.d = fp.d;
        ls.s_total = prev.s_total + ctx.track.progress(prev.s, fp.s);
        out.log.push_back(ls);
        if (ls.s_total >= stop.progress) {
          out.completed = true;
          return out;
        }
      }
      if (executed >= per_cycle) break;
    }
    state = out.log.back().state;
  }
  return out;
}

}  // namespace driftplan::planner
