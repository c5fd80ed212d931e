#pragma once

#include <cmath>
#include <numbers>

namespace driftplan::vehicle {

// Rigid-body and stiffness parameters of the rear-wheel-drive single-track car.
// The numeric defaults are artifact defaults for a mid-size sedan; the planner
// does not depend on them and every field can be overridden from the
// parameter file.
struct VehicleParams {
  double m = 1400.0;      // mass [kg]
  double J_z = 2000.0;    // yaw inertia [kg m^2]
  double l_f = 1.3;       // COG to front axle [m]
  double l_r = 1.3;       // COG to rear axle [m]
  double h = 0.4;         // COG height [m]
  double C_f = 6867.0;    // front lateral stiffness [N/rad]
  double C_r = 6867.0;    // rear lateral stiffness [N/rad]
  double C_x = 6867.0;    // rear longitudinal stiffness [N per unit slip]
  double v_max = 20.0;    // top speed [m/s]
  double a_max = 2.5;     // max deceleration magnitude [m/s^2]
  double g = 9.81;        // gravity [m/s^2]

  double wheelbase() const { return l_f + l_r; }
};

// Throws DomainError unless every field is strictly positive.
void validate(const VehicleParams& p);

// Magic Formula coefficients. Defaults are the gravel set.
struct TireParams {
  double B = 1.5289;
  double C = 1.0901;
  double D = 0.6;
  double E = -0.95084;
};

void validate(const TireParams& t);

struct DynamicState {
  double v = 0.0;       // speed [m/s]
  double beta = 0.0;    // side-slip angle [rad]
  double psidot = 0.0;  // yaw rate [rad/s]
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // (-pi, pi]
};

struct FullState {
  Pose pose;
  DynamicState dyn;
};

struct ControlInput {
  double delta = 0.0;   // steering angle [rad]
  double lambda = 0.0;  // rear longitudinal slip [-]
};

struct SlipState {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma = 0.0;
};

struct Friction {
  double mu_x = 0.0;
  double mu_y = 0.0;
};

struct SlipAngles {
  double alpha_f = 0.0;
  double alpha_r = 0.0;
};

struct NormalLoads {
  double F_zf = 0.0;
  double F_zr = 0.0;
  bool wheel_lift = false;  // one axle load saturated at zero
};

struct AxleForces {
  double F_xf = 0.0;  // always 0 (rear-wheel drive)
  double F_yf = 0.0;
  double F_xr = 0.0;
  double F_yr = 0.0;
  double F_zf = 0.0;
  double F_zr = 0.0;
  bool wheel_lift = false;
};

struct StateDerivatives {
  double vdot = 0.0;
  double betadot = 0.0;
  double psiddot = 0.0;
};

// Speed below which slip angles are undefined.
inline constexpr double kLowSpeedGuard = 0.5;

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

}  // namespace driftplan::vehicle
