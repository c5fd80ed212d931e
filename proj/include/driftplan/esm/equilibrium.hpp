#pragma once

#include <vector>

#include "driftplan/vehicle/types.hpp"

namespace driftplan::esm {

using vehicle::ControlInput;
using vehicle::DynamicState;
using vehicle::TireParams;
using vehicle::VehicleParams;

// A steady-state cornering solution: constant inputs under which the full
// model has vdot = betadot = psiddot = 0.
struct EquilibriumPoint {
  DynamicState dyn;
  ControlInput input;
  double radius = 0.0;    // R_c = v / psidot, signed like psidot
  double residual = 0.0;  // infinity norm of (vdot, betadot, psiddot)
  bool open_loop_unstable = false;
};

// Damped Newton with a central-difference Jacobian.
struct SolverOptions {
  int max_iter = 50;
  double tol = 1e-8;
  double fd_step = 1e-6;
};

// Infinity norm of the full-model state derivatives.
double equilibrium_residual(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p,
                            const TireParams& tires);

// Throws DegenerateInputError for delta = lambda = 0 (every straight-line
// speed is an equilibrium) or a root with zero yaw rate, NegativeSpeedError
// for a non-positive speed root and ConvergenceError when Newton stalls.
EquilibriumPoint solve_equilibrium(const ControlInput& input, const VehicleParams& p, const TireParams& tires,
                                   const DynamicState& guess, const SolverOptions& opts = {});

// Deviation measure used by the stability screen: max(|dv| / v_ref, |dbeta|, |dpsidot|).
double normalized_deviation(const DynamicState& a, const DynamicState& b);

// Largest normalized deviation from the equilibrium during a frozen-input
// rollout of the full model, started at the equilibrium displaced by
// `perturbation` in every normalized coordinate. A rollout that falls below
// the low-speed guard reports +infinity.
double frozen_input_drift(const EquilibriumPoint& eq, const VehicleParams& p, const TireParams& tires,
                          double duration = 5.0, double dt = 0.01, double perturbation = 0.0);

struct StabilityScreen {
  double duration = 5.0;      // s
  double dt = 0.01;           // s
  double perturbation = 1e-4; // normalized
  double ball = 0.05;         // normalized
};

// True when the perturbed rollout leaves the ball around the equilibrium.
bool open_loop_unstable(const EquilibriumPoint& eq, const VehicleParams& p, const TireParams& tires,
                        const StabilityScreen& screen = {});

// Mirror image for the opposite turning sense: (beta, psidot, delta) negated.
EquilibriumPoint mirror(const EquilibriumPoint& eq);

}  // namespace driftplan::esm
