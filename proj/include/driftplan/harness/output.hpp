#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "driftplan/esm/manifold.hpp"
#include "driftplan/planner/replan.hpp"
#include "driftplan/track/track.hpp"

namespace driftplan::harness {

inline constexpr const char* kTrajectoryColumns = "t,x,y,psi,v,beta,psidot,delta,lambda,s,d,mode";

// Root sample followed by every primitive sample of the plan, dt apart.
// (s, d) come from Track::to_frenet hinted with the previous sample.
std::vector<planner::LogSample> plan_samples(const planner::SearchResult& plan, const track::Track& track,
                                             double dt);

// `# key=value` metadata lines, then the column header, then one row per
// sample. Numbers are written in shortest round-trip form.
void write_trajectory_csv(std::ostream& out, const std::vector<planner::LogSample>& rows,
                          const std::vector<std::string>& header);

// Inverse of write_trajectory_csv (s_total is not stored and stays 0).
// Throws ParseError.
std::vector<planner::LogSample> read_trajectory_csv(const std::string& text);

void write_cycles_csv(std::ostream& out, const std::vector<planner::CycleRecord>& cycles,
                      const std::vector<std::string>& header);

// Track boundaries, explored branches (parent-to-child segments) and the
// chosen path.
std::string plan_svg(const track::Track& track, const planner::SearchResult& plan);

// Executed trajectory over the track; samples with |beta| above the drift
// threshold are drawn in a second colour.
std::string lap_track_svg(const track::Track& track, const std::vector<planner::LogSample>& log,
                          double drift_threshold);

// v, beta and psidot against time, one panel each.
std::string lap_states_svg(const std::vector<planner::LogSample>& log, double drift_threshold);

// Manifold samples in the (beta, psidot) plane, shaded by v.
std::string manifold_svg(const esm::Manifold& m);

}  // namespace driftplan::harness
