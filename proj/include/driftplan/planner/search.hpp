#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "driftplan/esm/manifold.hpp"
#include "driftplan/planner/config.hpp"
#include "driftplan/planner/heuristic.hpp"
#include "driftplan/track/track.hpp"
#include "driftplan/vehicle/types.hpp"

namespace driftplan::planner {

using vehicle::ControlInput;
using vehicle::DynamicState;
using vehicle::FullState;
using vehicle::Pose;

enum class Mode { kBicycle, kEsm };

const char* mode_name(Mode m);

using GridIndex = std::array<std::int64_t, 6>;

// Grid index (floor) and non-negative remainder of each state.
struct Discretized {
  GridIndex index{};
  std::array<double, 6> remainder{};
};

std::array<double, 6> state_vector(const FullState& s);
Discretized discretize(const FullState& s, const std::array<double, 6>& step);
// index * step + remainder, per state.
std::array<double, 6> reconstruct(const Discretized& d, const std::array<double, 6>& step);

struct Node {
  GridIndex index{};
  std::array<double, 6> remainder{};
  GridIndex parent_index{};
  int parent = -1;  // position of the parent in the search's node pool

  double g = 0.0;  // negated road progress from the root [m]
  double h = 0.0;  // augmented progress estimate for the remaining horizon [m]
  double f = 0.0;  // g - h, minimized
  int k = 0;
  int sibling_count = 0;
  Mode mode = Mode::kBicycle;

  FullState state;         // exact continuous state (index * step + remainder)
  ControlInput input;      // inputs that produced this node (endpoint inputs in ESM mode)
  double s = 0.0;          // modular arc length of the pose
  double d = 0.0;          // lateral deviation
  double progress = 0.0;   // -g, kept for readability
};

struct MotionPrimitive {
  std::vector<FullState> samples;  // substeps + 1, samples.front() == parent state
  DynamicState end;
  ControlInput input;
  Mode mode = Mode::kBicycle;
};

// Shared, read-only inputs of one planning problem.
struct PlanningContext {
  PlanningContext(const track::Track& track, const esm::Manifold& manifold, const vehicle::VehicleParams& params,
                  const vehicle::TireParams& tires, const PlannerConfig& config);

  const track::Track& track;
  const esm::Manifold& manifold;
  vehicle::VehicleParams params;
  vehicle::TireParams tires;
  PlannerConfig config;
  ProgressBound bound;
  double d_safe;
};

struct PruneCounts {
  std::size_t rule_i = 0;        // outside the manifold domain
  std::size_t rule_ii = 0;       // beta * psidot > 0 beyond the margin
  std::size_t rule_iii = 0;      // |dv| / T_s >= a_max
  std::size_t speed = 0;         // v outside (low-speed guard, v_max]
  std::size_t collision = 0;
  std::size_t profile = 0;       // faster than the corner-speed profile allows

  std::size_t total() const { return rule_i + rule_ii + rule_iii + speed + collision + profile; }
};

struct Child {
  Node node;
  MotionPrimitive primitive;
};

bool bicycle_region(const DynamicState& dyn, const PlannerConfig& c);

// Candidate endpoints of the ESM ring pattern around (beta0, psidot0).
std::vector<std::pair<double, double>> ring_samples(double beta0, double psidot0, const PlannerConfig& c);

// Linear transition of (v, beta, psidot) to `end` over T_s with poses from
// the kinematic equations.
MotionPrimitive esm_primitive(const FullState& start, const DynamicState& end, const ControlInput& input,
                              const PlannerConfig& c);
// Constant-input rollout of the bicycle model.
MotionPrimitive bicycle_primitive(const FullState& start, const ControlInput& input, const PlanningContext& ctx);

// True when any sample after the first leaves the inflated road, or cannot
// be projected. hint_s seeds the projection.
bool collision_check(const MotionPrimitive& prim, const track::Track& track, double d_safe, double hint_s);

// Children of `node` after pruning. Children carry g, h, f, k, sibling_count
// and Frenet data; `parent` is left for the caller.
std::vector<Child> expand(const Node& node, const PlanningContext& ctx, PruneCounts* pruned = nullptr);

// Root node for an initial state. Throws ProjectionError off the map.
Node make_root(const FullState& initial, const PlanningContext& ctx);

enum class Termination { kHorizon, kOpenEmpty, kTimeout };

const char* termination_name(Termination t);

struct SearchStats {
  std::size_t expansions = 0;
  std::size_t generated = 0;
  PruneCounts pruned;
  std::size_t duplicates_replaced = 0;
  std::size_t duplicates_ignored = 0;
  std::size_t peak_open = 0;
  int max_depth = 0;
  Termination termination = Termination::kOpenEmpty;
  double wall_time = 0.0;  // [s]

  std::string to_text() const;
};

struct PlanStep {
  Node node;                  // node reached at the end of the primitive
  MotionPrimitive primitive;
};

struct SearchResult {
  std::vector<PlanStep> steps;     // root excluded; empty for k_hor = 0
  Node root;
  std::vector<Node> explored;      // every node created, index = pool position
  SearchStats stats;

  double progress() const { return steps.empty() ? 0.0 : steps.back().node.progress; }
};

// Hybrid A* over the primitive graph. Returns the path to the deepest node
// reached (ties by f). Throws NoFeasibleNodeError when the root expansion is
// entirely pruned.
SearchResult search(const FullState& initial, const PlanningContext& ctx);

}  // namespace driftplan::planner
