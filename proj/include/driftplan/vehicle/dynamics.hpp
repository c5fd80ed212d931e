#pragma once

#include <span>
#include <vector>

#include "driftplan/vehicle/types.hpp"

namespace driftplan::vehicle {

// Nonlinear slip angles of the front and rear axle.
//   alpha_f = atan((v sin(beta) + l_f psidot) / (v cos(beta))) - delta
//   alpha_r = atan((v sin(beta) - l_r psidot) / (v cos(beta)))
// Throws LowSpeedError if v <= kLowSpeedGuard.
SlipAngles slip_angles(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p);

// Static split plus longitudinal weight transfer for acceleration a_x. Each
// load is saturated at zero; wheel_lift is set when that happens.
NormalLoads normal_loads(const VehicleParams& p, double a_x);

// Tire forces of the full model. The rear normal load depends on the
// longitudinal acceleration F_xr / m, which in turn depends on the rear load;
// the coupling is resolved by fixed-point iteration from the static loads.
// Lateral forces oppose the slip angle (F_y = -F_z mu_y), the drive force
// follows the slip (F_x = F_z mu_x).
AxleForces axle_forces(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p,
                       const TireParams& tires);

// Balance equations of the single-track model for given axle forces:
//   vdot    = psidot v beta + F_xr / m
//   betadot = (F_yf + F_yr) / (m v) - psidot
//   psiddot = (l_f F_yf - l_r F_yr) / J_z
StateDerivatives derivatives_from_forces(const DynamicState& dyn, const AxleForces& f,
                                         const VehicleParams& p);

StateDerivatives full_model_derivatives(const DynamicState& dyn, const ControlInput& input,
                                        const VehicleParams& p, const TireParams& tires);

// Linearized forces used near straight driving:
//   F_yf = -C_f (beta + l_f psidot / v - delta)
//   F_yr = -C_r (beta - l_r psidot / v)
//   F_xr = +C_x lambda  (positive slip drives forward, same sign as the full model)
// Normal loads are the static split.
AxleForces bicycle_forces(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p);

StateDerivatives bicycle_model_derivatives(const DynamicState& dyn, const ControlInput& input,
                                           const VehicleParams& p);

// Linear stiffnesses consistent with the friction curve slope at zero slip
// and the static axle loads.
struct Stiffness {
  double C_f;
  double C_r;
  double C_x;
};
Stiffness stiffness_from_tire(const VehicleParams& p, const TireParams& tires);

enum class Model { kFull, kBicycle };

// Fixed-step RK4 rollout of the dynamic states with frozen inputs. Returns
// steps + 1 samples including the initial one.
std::vector<DynamicState> rollout_dynamics(const DynamicState& dyn0, const ControlInput& input,
                                           double duration, int steps, Model model,
                                           const VehicleParams& p, const TireParams& tires);

// Integrates yaw and position along a sampled dynamic-state trajectory.
// Samples are dt apart and treated as piecewise linear in time; yaw is the
// exact integral of the interpolated yaw rate and x, y use classical RK4.
// Returns one pose per sample, starting with pose0.
std::vector<Pose> integrate_kinematics(const Pose& pose0, std::span<const DynamicState> dyn_traj,
                                       double dt);

}  // namespace driftplan::vehicle
