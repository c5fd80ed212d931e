#include "driftplan/planner/config.hpp"

#include <cmath>
#include <string>

#include "driftplan/error.hpp"

namespace driftplan::planner {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("planner config: " + what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

PlannerConfig default_planner_config() {
  PlannerConfig c;
  c.beta_scale = 3.0;
  c.delta_count = 7;
  c.lambda_count = 3;
  c.inner_count = 12;
  c.outer_count = 12;
  c.w_edge = 1.0;
  c.w_sibling = 2.0;
  c.w_corner = 0.5;
  c.w_shortfall = 2.0;
  c.profile_slack = 0.0;
  return c;
}

void validate(const PlannerConfig& c) {
  for (double s : c.grid_step) require(positive(s), "grid steps must be positive");
  require(positive(c.T_s), "T_s must be positive");
  require(c.substeps >= 1, "substeps must be at least 1");
  require(c.k_hor >= 0, "k_hor must be non-negative");
  require(c.N_timeout >= 1, "N_timeout must be at least 1");
  require(c.inner_count >= 0 && c.outer_count >= 0, "ring counts must be non-negative");
  require(c.inner_radius > 0.0 && c.outer_radius > c.inner_radius, "ring radii must be positive and increasing");
  require(positive(c.beta_scale) && positive(c.psidot_scale), "ring scales must be positive");
  require(positive(c.beta_lin) && positive(c.psidot_lin), "bicycle region bounds must be positive");
  require(c.delta_count >= 1 && c.lambda_count >= 1, "bicycle grid counts must be at least 1");
  require(c.delta_min <= c.delta_max && c.lambda_min <= c.lambda_max, "bicycle grid ranges are reversed");
  require(c.lambda_min > -1.0, "lambda_min must be above -1");
  require(positive(c.a_max) && positive(c.v_max), "a_max and v_max must be positive");
  require(c.beta_margin >= 0.0, "beta_margin must be non-negative");
  require(c.half_width >= 0.0 && c.clearance >= 0.0, "footprint must be non-negative");
  require(c.w_smooth >= 0.0 && c.w_edge >= 0.0 && c.w_sibling >= 0.0, "heuristic weights must be non-negative");
  require(c.w_corner >= 0.0 && c.w_corner <= 1.0, "w_corner must lie in [0, 1]");
  require(c.edge_soft >= 0.0 && c.a_lat >= 0.0, "edge_soft and a_lat must be non-negative");
  require(c.w_shortfall >= 0.0, "w_shortfall must be non-negative");
  require(!std::isnan(c.profile_slack) && c.profile_slack >= 0.0, "profile_slack must be non-negative");
  require(positive(c.T_rep) && positive(c.T_plan), "T_rep and T_plan must be positive");
  require(c.T_plan <= c.T_rep, "T_plan must not exceed T_rep");
  const double steps = c.T_rep / c.dt();
  require(std::abs(steps - std::round(steps)) < 1e-9, "T_rep must be a multiple of T_s / substeps");
}

}  // namespace driftplan::planner
