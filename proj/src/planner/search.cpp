#include "driftplan/planner/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "driftplan/error.hpp"
#include "driftplan/vehicle/dynamics.hpp"

namespace driftplan::planner {

namespace {

// Projection windows: consecutive samples are < 1 m apart, a whole
// primitive covers < 11 m forward.
constexpr double kSampleWindow = 3.0;
constexpr double kEndpointWindow = 12.0;

double max_lateral_acceleration(const esm::Manifold& m) {
  double a = 0.0;
  for (const auto& s : m.samples()) a = std::max(a, std::abs(s.v * s.psidot));
  return a;
}

double grid_value(double lo, double hi, int count, int i) {
  return count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
}

struct Projection {
  bool collision = false;
  track::FrenetPose end;
  double progress = 0.0;
};

Projection project_primitive(const MotionPrimitive& prim, const track::Track& track, double d_safe, double hint_s) {
  Projection out;
  // Endpoint first: most colliding primitives are already off-road there.
  const Pose& last = prim.samples.back().pose;
  const auto end = track.project_local({last.x, last.y}, hint_s + 0.5 * kEndpointWindow, kEndpointWindow);
  if (!end || std::abs(end->d) > d_safe) {
    out.collision = true;
    return out;
  }
  double s_prev = hint_s;
  for (std::size_t i = 1; i < prim.samples.size(); ++i) {
    const Pose& p = prim.samples[i].pose;
    const auto fp = track.project_local({p.x, p.y}, s_prev, kSampleWindow);
    if (!fp || std::abs(fp->d) > d_safe) {
      out.collision = true;
      return out;
    }
    out.progress += track.progress(s_prev, fp->s);
    s_prev = fp->s;
    out.end = *fp;
  }
  return out;
}

struct Key {
  GridIndex index;
  int k;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& key) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : key.index) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    h ^= static_cast<std::uint64_t>(key.k);
    h *= 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

struct Entry {
  double f;
  int k;
  std::uint64_t seq;
  int idx;
};

// Lowest f, then highest k, then first inserted.
struct EntryAfter {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.k != b.k) return a.k < b.k;
    return a.seq > b.seq;
  }
};

// Deeper wins, then lower f, then earlier creation.
bool deeper(const Node& a, int ia, const Node& b, int ib) {
  if (a.k != b.k) return a.k > b.k;
  if (a.f != b.f) return a.f < b.f;
  return ia < ib;
}

}  // namespace

const char* mode_name(Mode m) { return m == Mode::kEsm ? "esm" : "bicycle"; }

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::kHorizon:
      return "horizon";
    case Termination::kOpenEmpty:
      return "open_empty";
    case Termination::kTimeout:
      return "timeout";
  }
  return "unknown";
}

std::array<double, 6> state_vector(const FullState& s) {
  return {s.pose.x, s.pose.y, s.pose.psi, s.dyn.v, s.dyn.beta, s.dyn.psidot};
}

Discretized discretize(const FullState& s, const std::array<double, 6>& step) {
  const auto x = state_vector(s);
  Discretized d;
  for (std::size_t i = 0; i < 6; ++i) {
    const double q = std::floor(x[i] / step[i]);
    d.index[i] = static_cast<std::int64_t>(q);
    d.remainder[i] = x[i] - q * step[i];
    // Guard against the remainder rounding up to a full step.
    if (d.remainder[i] >= step[i]) {
      d.index[i] += 1;
      d.remainder[i] = x[i] - static_cast<double>(d.index[i]) * step[i];
    }
  }
  return d;
}

std::array<double, 6> reconstruct(const Discretized& d, const std::array<double, 6>& step) {
  std::array<double, 6> x{};
  for (std::size_t i = 0; i < 6; ++i) x[i] = static_cast<double>(d.index[i]) * step[i] + d.remainder[i];
  return x;
}

PlanningContext::PlanningContext(const track::Track& track_, const esm::Manifold& manifold_,
                                 const vehicle::VehicleParams& params_, const vehicle::TireParams& tires_,
                                 const PlannerConfig& config_)
    : track(track_), manifold(manifold_), params(params_), tires(tires_), config(config_) {
  validate(config);
  d_safe = 0.5 * track.width() - (config.half_width + config.clearance);
  if (!(d_safe > 0.0)) throw ConfigError("planner config: vehicle footprint does not fit on the road");
  double a_lat = config.a_lat;
  if (a_lat <= 0.0) a_lat = max_lateral_acceleration(manifold);
  bound = ProgressBound(track, 0.5 * track.width(), config.a_max, config.v_max, a_lat);
}

bool bicycle_region(const DynamicState& dyn, const PlannerConfig& c) {
  return std::abs(dyn.beta) < c.beta_lin && std::abs(dyn.psidot) < c.psidot_lin;
}

std::vector<std::pair<double, double>> ring_samples(double beta0, double psidot0, const PlannerConfig& c) {
  std::vector<std::pair<double, double>> out;
  if (c.sample_center) out.emplace_back(beta0, psidot0);
  auto ring = [&](double r, int count, double phase) {
    for (int j = 0; j < count; ++j) {
      const double a = 2.0 * std::numbers::pi * (j + phase) / count;
      out.emplace_back(beta0 + r * std::cos(a) * c.beta_scale, psidot0 + r * std::sin(a) * c.psidot_scale);
    }
  };
  ring(c.inner_radius, c.inner_count, 0.0);
  ring(c.outer_radius, c.outer_count, 0.5);
  return out;
}

namespace {

// Dynamic states only; poses are filled in by complete_poses once the
// endpoint has passed the cheap pruning rules.
MotionPrimitive bicycle_rollout(const FullState& start, const ControlInput& input, const PlanningContext& ctx) {
  const PlannerConfig& c = ctx.config;
  const auto dyn =
      vehicle::rollout_dynamics(start.dyn, input, c.T_s, c.substeps, vehicle::Model::kBicycle, ctx.params, ctx.tires);
  MotionPrimitive prim;
  prim.samples.resize(dyn.size());
  for (std::size_t i = 0; i < dyn.size(); ++i) prim.samples[i].dyn = dyn[i];
  prim.samples.front() = start;
  prim.end = dyn.back();
  prim.input = input;
  prim.mode = Mode::kBicycle;
  return prim;
}

void complete_poses(MotionPrimitive& prim, const Pose& start, const PlannerConfig& c) {
  std::vector<DynamicState> dyn(prim.samples.size());
  for (std::size_t i = 0; i < dyn.size(); ++i) dyn[i] = prim.samples[i].dyn;
  const auto poses = vehicle::integrate_kinematics(start, dyn, c.dt());
  for (std::size_t i = 1; i < poses.size(); ++i) prim.samples[i].pose = poses[i];
  prim.samples.front().pose = start;
}

}  // namespace

MotionPrimitive esm_primitive(const FullState& start, const DynamicState& end, const ControlInput& input,
                              const PlannerConfig& c) {
  std::vector<DynamicState> dyn(static_cast<std::size_t>(c.substeps) + 1);
  for (int i = 0; i <= c.substeps; ++i) {
    const double u = static_cast<double>(i) / c.substeps;
    dyn[static_cast<std::size_t>(i)] = {start.dyn.v + u * (end.v - start.dyn.v),
                                        start.dyn.beta + u * (end.beta - start.dyn.beta),
                                        start.dyn.psidot + u * (end.psidot - start.dyn.psidot)};
  }
  dyn.front() = start.dyn;
  dyn.back() = end;
  const auto poses = vehicle::integrate_kinematics(start.pose, dyn, c.dt());
  MotionPrimitive prim;
  prim.samples.reserve(dyn.size());
  for (std::size_t i = 0; i < dyn.size(); ++i) prim.samples.push_back({poses[i], dyn[i]});
  prim.samples.front().pose = start.pose;
  prim.end = end;
  prim.input = input;
  prim.mode = Mode::kEsm;
  return prim;
}

MotionPrimitive bicycle_primitive(const FullState& start, const ControlInput& input, const PlanningContext& ctx) {
  MotionPrimitive prim = bicycle_rollout(start, input, ctx);
  complete_poses(prim, start.pose, ctx.config);
  return prim;
}

bool collision_check(const MotionPrimitive& prim, const track::Track& track, double d_safe, double hint_s) {
  return project_primitive(prim, track, d_safe, hint_s).collision;
}

namespace {

double augmented_h(const Node& child, const DynamicState& parent_dyn, const PlanningContext& ctx) {
  const PlannerConfig& c = ctx.config;
  const double t_rem = (c.k_hor - child.k) * c.T_s;
  const double v = child.state.dyn.v;
  double h = ctx.bound.upper(child.s, v, t_rem);
  if (c.w_corner > 0.0 && t_rem > 0.0) {
    const double est = ctx.bound.corner(child.s, v, t_rem);
    h -= c.w_corner * std::max(0.0, h - est);
  }
  if (c.w_shortfall > 0.0) h -= c.w_shortfall * t_rem;
  if (c.w_smooth > 0.0) {
    h -= c.w_smooth * (std::abs(v - parent_dyn.v) + std::abs(child.state.dyn.beta - parent_dyn.beta) +
                       std::abs(child.state.dyn.psidot - parent_dyn.psidot));
  }
  if (c.w_edge > 0.0) h -= c.w_edge * std::max(0.0, std::abs(child.d) - c.edge_soft);
  if (c.w_sibling > 0.0) h -= c.w_sibling / (1.0 + child.sibling_count);
  return h;
}

}  // namespace

Node make_root(const FullState& initial, const PlanningContext& ctx) {
  Node root;
  FullState st = initial;
  st.pose.psi = vehicle::wrap_angle(st.pose.psi);
  const Discretized dz = discretize(st, ctx.config.grid_step);
  root.index = dz.index;
  root.remainder = dz.remainder;
  root.parent_index = dz.index;
  root.state = st;
  const track::FrenetPose fp = ctx.track.to_frenet(track::Point{st.pose.x, st.pose.y});
  root.s = fp.s;
  root.d = fp.d;
  root.mode = bicycle_region(st.dyn, ctx.config) ? Mode::kBicycle : Mode::kEsm;
  root.g = 0.0;
  root.progress = 0.0;
  root.h = augmented_h(root, st.dyn, ctx);
  root.f = root.g - root.h;
  return root;
}

std::vector<Child> expand(const Node& node, const PlanningContext& ctx, PruneCounts* pruned) {
  PruneCounts local;
  PruneCounts& pc = pruned ? *pruned : local;
  const PlannerConfig& c = ctx.config;
  const FullState& start = node.state;
  const double dv_limit = c.a_max * c.T_s;

  std::vector<MotionPrimitive> candidates;

  if (c.esm_enabled && !ctx.manifold.empty()) {
    for (const auto& [beta, psidot] : ring_samples(start.dyn.beta, start.dyn.psidot, c)) {
      const auto q = ctx.manifold.query(beta, psidot);
      if (!q) {
        ++pc.rule_i;
        continue;
      }
      if (beta * psidot > 0.0 && std::abs(beta) >= c.beta_margin) {
        ++pc.rule_ii;
        continue;
      }
      if (std::abs(q->v - start.dyn.v) >= dv_limit) {
        ++pc.rule_iii;
        continue;
      }
      if (!(q->v > vehicle::kLowSpeedGuard) || q->v > c.v_max) {
        ++pc.speed;
        continue;
      }
      candidates.push_back(esm_primitive(start, {q->v, beta, psidot}, {q->delta, q->lambda}, c));
    }
  }

  if (c.bicycle_enabled && bicycle_region(start.dyn, c)) {
    for (int i = 0; i < c.delta_count; ++i) {
      for (int j = 0; j < c.lambda_count; ++j) {
        const ControlInput in{grid_value(c.delta_min, c.delta_max, c.delta_count, i),
                              grid_value(c.lambda_min, c.lambda_max, c.lambda_count, j)};
        MotionPrimitive prim;
        try {
          prim = bicycle_rollout(start, in, ctx);
        } catch (const Error&) {
          ++pc.speed;
          continue;
        }
        bool ok = true;
        for (const auto& s : prim.samples) {
          if (!(s.dyn.v > vehicle::kLowSpeedGuard) || !std::isfinite(s.dyn.v)) ok = false;
        }
        if (!ok || prim.end.v > c.v_max) {
          ++pc.speed;
          continue;
        }
        if (std::abs(prim.end.v - start.dyn.v) >= dv_limit) {
          ++pc.rule_iii;
          continue;
        }
        complete_poses(prim, start.pose, c);
        candidates.push_back(std::move(prim));
      }
    }
  }

  std::vector<Child> out;
  std::vector<Projection> proj;
  for (auto& prim : candidates) {
    const Projection p = project_primitive(prim, ctx.track, ctx.d_safe, node.s);
    if (p.collision) {
      ++pc.collision;
      continue;
    }
    if (prim.end.v > ctx.bound.speed_profile(p.end.s) + c.profile_slack) {
      ++pc.profile;
      continue;
    }
    Child ch;
    ch.primitive = std::move(prim);
    proj.push_back(p);
    out.push_back(std::move(ch));
  }

  const int survivors = static_cast<int>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Node& n = out[i].node;
    const MotionPrimitive& prim = out[i].primitive;
    FullState st = prim.samples.back();
    st.pose.psi = vehicle::wrap_angle(st.pose.psi);
    out[i].primitive.samples.back().pose.psi = st.pose.psi;
    const Discretized dz = discretize(st, c.grid_step);
    n.index = dz.index;
    n.remainder = dz.remainder;
    n.parent_index = node.index;
    n.state = st;
    n.input = prim.input;
    n.mode = prim.mode;
    n.k = node.k + 1;
    n.sibling_count = survivors;
    n.s = proj[i].end.s;
    n.d = proj[i].end.d;
    n.progress = node.progress + proj[i].progress;
    n.g = -n.progress;
    n.h = augmented_h(n, start.dyn, ctx);
    n.f = n.g - n.h;
  }
  return out;
}

std::string SearchStats::to_text() const {
  std::ostringstream out;
  out << "expansions " << expansions << '\n'
      << "generated " << generated << '\n'
      << "pruned_rule_i " << pruned.rule_i << '\n'
      << "pruned_rule_ii " << pruned.rule_ii << '\n'
      << "pruned_rule_iii " << pruned.rule_iii << '\n'
      << "pruned_speed " << pruned.speed << '\n'
      << "pruned_collision " << pruned.collision << '\n'
      << "pruned_profile " << pruned.profile << '\n'
      << "duplicates_replaced " << duplicates_replaced << '\n'
      << "duplicates_ignored " << duplicates_ignored << '\n'
      << "peak_open " << peak_open << '\n'
      << "max_depth " << max_depth << '\n'
      << "termination " << termination_name(termination) << '\n';
  return out.str();
}

SearchResult search(const FullState& initial, const PlanningContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const PlannerConfig& c = ctx.config;
  SearchResult result;
  SearchStats& st = result.stats;

  std::vector<Node>& pool = result.explored;
  std::vector<char> alive, closed;
  std::unordered_map<Key, int, KeyHash> table;
  std::priority_queue<Entry, std::vector<Entry>, EntryAfter> open;
  std::uint64_t seq = 0;
  std::size_t open_live = 0;

  auto insert = [&](Node n) {
    const int idx = static_cast<int>(pool.size());
    pool.push_back(std::move(n));
    alive.push_back(1);
    closed.push_back(0);
    table[{pool[idx].index, pool[idx].k}] = idx;
    open.push({pool[idx].f, pool[idx].k, seq++, idx});
    ++open_live;
    st.peak_open = std::max(st.peak_open, open_live);
    return idx;
  };

  result.root = make_root(initial, ctx);
  insert(result.root);
  int goal = -1;

  while (true) {
    if (open.empty()) {
      st.termination = Termination::kOpenEmpty;
      break;
    }
    const Entry e = open.top();
    open.pop();
    if (!alive[static_cast<std::size_t>(e.idx)]) continue;
    --open_live;
    const Node& cur = pool[static_cast<std::size_t>(e.idx)];
    if (cur.k >= c.k_hor) {
      st.termination = Termination::kHorizon;
      goal = e.idx;
      break;
    }
    closed[static_cast<std::size_t>(e.idx)] = 1;
    ++st.expansions;

    std::vector<Child> children = expand(cur, ctx, &st.pruned);
    if (e.idx == 0 && children.empty()) {
      throw NoFeasibleNodeError("search: every primitive from the initial state was pruned");
    }
    const GridIndex parent_index = cur.index;
    for (auto& ch : children) {
      ++st.generated;
      Node n = std::move(ch.node);
      n.parent = e.idx;
      n.parent_index = parent_index;
      const auto it = table.find({n.index, n.k});
      if (it != table.end()) {
        const auto old = static_cast<std::size_t>(it->second);
        if (closed[old] || pool[old].g <= n.g) {
          ++st.duplicates_ignored;
          continue;
        }
        alive[old] = 0;
        --open_live;
        ++st.duplicates_replaced;
      }
      const int idx = insert(std::move(n));
      st.max_depth = std::max(st.max_depth, pool[static_cast<std::size_t>(idx)].k);
    }
    if (open_live > c.N_timeout) {
      st.termination = Termination::kTimeout;
      break;
    }
  }

  if (goal < 0) {
    // Deepest surviving node, ties by f.
    goal = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (alive[i] && deeper(pool[i], static_cast<int>(i), pool[static_cast<std::size_t>(goal)], goal)) {
        goal = static_cast<int>(i);
      }
    }
  }

  std::vector<int> chain;
  for (int i = goal; i > 0; i = pool[static_cast<std::size_t>(i)].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  for (int i : chain) {
    const Node& n = pool[static_cast<std::size_t>(i)];
    const Node& parent = pool[static_cast<std::size_t>(n.parent)];
    MotionPrimitive prim = (n.mode == Mode::kEsm) ? esm_primitive(parent.state, n.state.dyn, n.input, c)
                                                  : bicycle_primitive(parent.state, n.input, ctx);
    prim.samples.back().pose.psi = n.state.pose.psi;
    result.steps.push_back({n, std::move(prim)});
  }

  st.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace driftplan::planner
