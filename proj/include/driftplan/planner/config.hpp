#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <numbers>

namespace driftplan::planner {

// State order used by every 6-element array in the planner.
enum StateIndex : std::size_t { kX = 0, kY, kPsi, kV, kBeta, kPsidot };

struct PlannerConfig {
  // x [m], y [m], psi [rad], v [m/s], beta [rad], psidot [rad/s]
  std::array<double, 6> grid_step = {0.5, 0.5, 5.0 * std::numbers::pi / 180.0, 0.25, 0.02, 0.05};

  double T_s = 0.5;        // primitive duration [s]
  int substeps = 20;       // samples per primitive (spacing T_s / substeps)
  int k_hor = 12;          // horizon depth
  std::size_t N_timeout = 60000;

  // ESM sampling around (beta0, psidot0), in (beta / beta_scale, psidot / psidot_scale).
  bool esm_enabled = true;
  bool sample_center = true;
  double inner_radius = 0.05;
  int inner_count = 8;
  double outer_radius = 0.15;
  int outer_count = 8;
  double beta_scale = 1.0;    // rad
  double psidot_scale = 1.0;  // rad/s

  // Bicycle mode is active for |beta| < beta_lin and |psidot| < psidot_lin.
  bool bicycle_enabled = true;
  double beta_lin = 0.1;
  double psidot_lin = 0.3;
  double delta_min = -0.15;
  double delta_max = 0.15;
  int delta_count = 13;
  double lambda_min = -0.5;
  double lambda_max = 0.5;
  int lambda_count = 5;

  double a_max = 2.5;        // rule iii: |dv| / T_s must stay below this [m/s^2]
  double v_max = 20.0;       // [m/s]
  double beta_margin = 0.05; // rule ii margin [rad]

  // Point-mass footprint: |d| <= width/2 - (half_width + clearance).
  double half_width = 0.9;
  double clearance = 0.1;

  // Heuristic augmentations (all zero gives the plain bang-bang bound).
  double w_smooth = 0.0;
  double w_edge = 0.0;
  double edge_soft = 2.5;    // |d| beyond this is penalized by w_edge [m]
  double w_sibling = 0.0;
  double w_corner = 0.0;     // blend toward the corner-speed estimate, in [0, 1]
  double a_lat = 0.0;        // lateral acceleration of the corner-speed estimate; 0 takes it from the manifold
  double w_shortfall = 0.0;  // expected speed deficit against the estimate over the remaining horizon [m/s]

  // Children faster than the corner-speed profile plus this slack are
  // pruned [m/s]; infinity disables the check.
  double profile_slack = std::numeric_limits<double>::infinity();

  double T_rep = 1.0;   // [s]
  double T_plan = 1.0;  // [s]

  double dt() const { return T_s / substeps; }
};

// Planner defaults used by the harness: the plain config plus the tuned
// augmentation weights.
PlannerConfig default_planner_config();

// Throws ConfigError when a field is out of range.
void validate(const PlannerConfig& c);

}  // namespace driftplan::planner
