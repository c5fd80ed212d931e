#include "driftplan/vehicle/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftplan/error.hpp"
#include "driftplan/vehicle/tire.hpp"

namespace driftplan::vehicle {

namespace {

// The load transfer contracts with ratio h * mu_x / L (< 0.1 for road cars),
// so this converges to round-off well inside the iteration cap.
constexpr int kLoadTransferMaxIter = 50;
constexpr double kLoadTransferTol = 1e-9;  // N

void require_speed(double v, const char* who) {
  if (!(v > kLowSpeedGuard)) {
    throw LowSpeedError(std::string(who) + ": speed " + std::to_string(v) +
                        " m/s is at or below the low-speed guard");
  }
}

}  // namespace

void validate(const VehicleParams& p) {
  const double fields[] = {p.m, p.J_z, p.l_f, p.l_r, p.h, p.C_f, p.C_r, p.C_x, p.v_max, p.a_max, p.g};
  for (double f : fields) {
    if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("vehicle parameters must be strictly positive");
  }
}

SlipAngles slip_angles(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p) {
  require_speed(dyn.v, "slip_angles");
  const double vx = dyn.v * std::cos(dyn.beta);
  const double vy = dyn.v * std::sin(dyn.beta);
  return {std::atan((vy + p.l_f * dyn.psidot) / vx) - input.delta,
          std::atan((vy - p.l_r * dyn.psidot) / vx)};
}

NormalLoads normal_loads(const VehicleParams& p, double a_x) {
  const double L = p.wheelbase();
  NormalLoads n;
  n.F_zf = p.m * (p.g * p.l_r - a_x * p.h) / L;
  n.F_zr = p.m * (p.g * p.l_f + a_x * p.h) / L;
  if (n.F_zf < 0.0) {
    n.F_zf = 0.0;
    n.F_zr = p.m * p.g;
    n.wheel_lift = true;
  } else if (n.F_zr < 0.0) {
    n.F_zr = 0.0;
    n.F_zf = p.m * p.g;
    n.wheel_lift = true;
  }
  return n;
}

AxleForces axle_forces(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p,
                       const TireParams& tires) {
  const SlipAngles alpha = slip_angles(dyn, input, p);
  const Friction mu_f = mf_friction(theoretical_slips(0.0, alpha.alpha_f), tires);
  const Friction mu_r = mf_friction(theoretical_slips(input.lambda, alpha.alpha_r), tires);

  NormalLoads loads = normal_loads(p, 0.0);
  for (int it = 0; it < kLoadTransferMaxIter; ++it) {
    const NormalLoads next = normal_loads(p, loads.F_zr * mu_r.mu_x / p.m);
    const double change = std::abs(next.F_zr - loads.F_zr);
    loads = next;
    if (change < kLoadTransferTol) break;
  }

  AxleForces f;
  f.F_zf = loads.F_zf;
  f.F_zr = loads.F_zr;
  f.wheel_lift = loads.wheel_lift;
  f.F_xf = 0.0;
  f.F_yf = -loads.F_zf * mu_f.mu_y;
  f.F_xr = loads.F_zr * mu_r.mu_x;
  f.F_yr = -loads.F_zr * mu_r.mu_y;
  return f;
}

StateDerivatives derivatives_from_forces(const DynamicState& dyn, const AxleForces& f,
                                         const VehicleParams& p) {
  require_speed(dyn.v, "derivatives_from_forces");
  StateDerivatives d;
  d.vdot = dyn.psidot * dyn.v * dyn.beta + f.F_xr / p.m;
  d.betadot = (f.F_yf + f.F_yr) / (p.m * dyn.v) - dyn.psidot;
  d.psiddot = (p.l_f * f.F_yf - p.l_r * f.F_yr) / p.J_z;
  return d;
}

StateDerivatives full_model_derivatives(const DynamicState& dyn, const ControlInput& input,
                                        const VehicleParams& p, const TireParams& tires) {
  return derivatives_from_forces(dyn, axle_forces(dyn, input, p, tires), p);
}

AxleForces bicycle_forces(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p) {
  require_speed(dyn.v, "bicycle_forces");
  const NormalLoads loads = normal_loads(p, 0.0);
  AxleForces f;
  f.F_zf = loads.F_zf;
  f.F_zr = loads.F_zr;
  f.F_yf = -p.C_f * (dyn.beta + p.l_f * dyn.psidot / dyn.v - input.delta);
  f.F_yr = -p.C_r * (dyn.beta - p.l_r * dyn.psidot / dyn.v);
  f.F_xr = p.C_x * input.lambda;
  return f;
}

StateDerivatives bicycle_model_derivatives(const DynamicState& dyn, const ControlInput& input,
                                           const VehicleParams& p) {
  return derivatives_from_forces(dyn, bicycle_forces(dyn, input, p), p);
}

Stiffness stiffness_from_tire(const VehicleParams& p, const TireParams& tires) {
  const NormalLoads loads = normal_loads(p, 0.0);
  const double slope = mf_origin_slope(tires);
  return {loads.F_zf * slope, loads.F_zr * slope, loads.F_zr * slope};
}

std::vector<DynamicState> rollout_dynamics(const DynamicState& dyn0, const ControlInput& input,
                                           double duration, int steps, Model model,
                                           const VehicleParams& p, const TireParams& tires) {
  if (steps <= 0 || !(duration > 0.0)) throw DomainError("rollout_dynamics: need steps > 0 and duration > 0");
  auto rhs = [&](const DynamicState& s) {
    return model == Model::kFull ? full_model_derivatives(s, input, p, tires)
                                 : bicycle_model_derivatives(s, input, p);
  };
  auto add = [](const DynamicState& s, const StateDerivatives& d, double k) {
    return DynamicState{s.v + k * d.vdot, s.beta + k * d.betadot, s.psidot + k * d.psiddot};
  };

  const double dt = duration / steps;
  std::vector<DynamicState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(dyn0);
  DynamicState s = dyn0;
  for (int i = 0; i < steps; ++i) {
    const StateDerivatives k1 = rhs(s);
    const StateDerivatives k2 = rhs(add(s, k1, dt / 2));
    const StateDerivatives k3 = rhs(add(s, k2, dt / 2));
    const StateDerivatives k4 = rhs(add(s, k3, dt));
    s.v += dt / 6 * (k1.vdot + 2 * k2.vdot + 2 * k3.vdot + k4.vdot);
    s.beta += dt / 6 * (k1.betadot + 2 * k2.betadot + 2 * k3.betadot + k4.betadot);
    s.psidot += dt / 6 * (k1.psiddot + 2 * k2.psiddot + 2 * k3.psiddot + k4.psiddot);
    out.push_back(s);
  }
  return out;
}

std::vector<Pose> integrate_kinematics(const Pose& pose0, std::span<const DynamicState> dyn_traj,
                                       double dt) {
  if (!(dt > 0.0)) throw DomainError("integrate_kinematics: dt must be positive");
  std::vector<Pose> out;
  if (dyn_traj.empty()) return out;
  out.reserve(dyn_traj.size());
  out.push_back({pose0.x, pose0.y, wrap_angle(pose0.psi)});

  double x = pose0.x;
  double y = pose0.y;
  double psi = pose0.psi;  // unwrapped while integrating
  for (std::size_t i = 0; i + 1 < dyn_traj.size(); ++i) {
    const DynamicState& a = dyn_traj[i];
    const DynamicState& b = dyn_traj[i + 1];
    // Within the step v, beta and psidot are linear in t, so psi is quadratic.
    auto heading = [&](double t) {
      return psi + a.psidot * t + (b.psidot - a.psidot) * t * t / (2.0 * dt);
    };
    auto velocity = [&](double t, double& vx, double& vy) {
      const double w = t / dt;
      const double v = a.v + w * (b.v - a.v);
      const double course = heading(t) + a.beta + w * (b.beta - a.beta);
      vx = v * std::cos(course);
      vy = v * std::sin(course);
    };
    // The right-hand side does not depend on x, y: RK4 reduces to Simpson.
    double x0, y0, xm, ym, x1, y1;
    velocity(0.0, x0, y0);
    velocity(dt / 2, xm, ym);
    velocity(dt, x1, y1);
    x += dt / 6 * (x0 + 4 * xm + x1);
    y += dt / 6 * (y0 + 4 * ym + y1);
    psi = heading(dt);
    out.push_back({x, y, wrap_angle(psi)});
  }
  return out;
}

}  // namespace driftplan::vehicle
