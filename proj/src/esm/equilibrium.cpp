#include "driftplan/esm/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "driftplan/error.hpp"
#include "driftplan/vehicle/dynamics.hpp"

namespace driftplan::esm {

using vehicle::full_model_derivatives;
using vehicle::StateDerivatives;

namespace {

using Vec3 = Eigen::Vector3d;

DynamicState to_state(const Vec3& x) { return {x(0), x(1), x(2)}; }

// Residual vector, or nullopt-like NaN vector when the state leaves the
// model's domain (low speed, |alpha| >= pi/2).
bool eval(const Vec3& x, const ControlInput& input, const VehicleParams& p, const TireParams& tires, Vec3& out) {
  try {
    const StateDerivatives d = full_model_derivatives(to_state(x), input, p, tires);
    out = Vec3(d.vdot, d.betadot, d.psiddot);
    return out.allFinite();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

double equilibrium_residual(const DynamicState& dyn, const ControlInput& input, const VehicleParams& p,
                            const TireParams& tires) {
  const StateDerivatives d = full_model_derivatives(dyn, input, p, tires);
  return std::max({std::abs(d.vdot), std::abs(d.betadot), std::abs(d.psiddot)});
}

EquilibriumPoint solve_equilibrium(const ControlInput& input, const VehicleParams& p, const TireParams& tires,
                                   const DynamicState& guess, const SolverOptions& opts) {
  if (input.delta == 0.0 && input.lambda == 0.0) {
    throw DegenerateInputError("solve_equilibrium: delta = lambda = 0 admits a continuum of straight-line equilibria");
  }
  if (!(guess.v > vehicle::kLowSpeedGuard)) {
    throw LowSpeedError("solve_equilibrium: initial guess below the low-speed guard");
  }

  Vec3 x(guess.v, guess.beta, guess.psidot);
  Vec3 F;
  if (!eval(x, input, p, tires, F)) throw ConvergenceError("solve_equilibrium: guess outside the model domain");

  const double h = opts.fd_step;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const double norm = F.lpNorm<Eigen::Infinity>();
    if (norm < opts.tol) {
      if (!(x(0) > 0.0)) throw NegativeSpeedError("solve_equilibrium: non-positive speed root");
      if (std::abs(x(2)) < 1e-9) {
        throw DegenerateInputError("solve_equilibrium: converged to a straight-line state");
      }
      EquilibriumPoint eq;
      eq.dyn = to_state(x);
      eq.input = input;
      eq.radius = x(0) / x(2);
      eq.residual = norm;
      return eq;
    }
    if (it == opts.max_iter) break;

    Eigen::Matrix3d J;
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x, fp, fm;
      xp(j) += h;
      xm(j) -= h;
      if (!eval(xp, input, p, tires, fp) || !eval(xm, input, p, tires, fm)) {
        throw ConvergenceError("solve_equilibrium: Jacobian stencil left the model domain");
      }
      J.col(j) = (fp - fm) / (2.0 * h);
    }
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
    if (!lu.isInvertible()) throw ConvergenceError("solve_equilibrium: singular Jacobian");
    const Vec3 dx = lu.solve(-F);

    // Halve the step until the residual decreases and the state stays valid.
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      const Vec3 xn = x + t * dx;
      Vec3 Fn;
      if (xn(0) > vehicle::kLowSpeedGuard && eval(xn, input, p, tires, Fn) &&
          Fn.lpNorm<Eigen::Infinity>() < norm) {
        x = xn;
        F = Fn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw ConvergenceError("solve_equilibrium: no convergence for delta=" + std::to_string(input.delta) +
                         " lambda=" + std::to_string(input.lambda));
}

double normalized_deviation(const DynamicState& a, const DynamicState& b) {
  const double v_ref = std::max(std::abs(b.v), 1.0);
  return std::max({std::abs(a.v - b.v) / v_ref, std::abs(a.beta - b.beta), std::abs(a.psidot - b.psidot)});
}

double frozen_input_drift(const EquilibriumPoint& eq, const VehicleParams& p, const TireParams& tires,
                          double duration, double dt, double perturbation) {
  const int steps = std::max(1, static_cast<int>(std::lround(duration / dt)));
  DynamicState start = eq.dyn;
  start.v += perturbation * std::max(std::abs(eq.dyn.v), 1.0);
  start.beta += perturbation;
  start.psidot += perturbation;
  try {
    const auto traj = vehicle::rollout_dynamics(start, eq.input, duration, steps, vehicle::Model::kFull, p, tires);
    double worst = 0.0;
    for (const auto& s : traj) {
      const double dev = normalized_deviation(s, eq.dyn);
      if (!std::isfinite(dev)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, dev);
    }
    return worst;
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

bool open_loop_unstable(const EquilibriumPoint& eq, const VehicleParams& p, const TireParams& tires,
                        const StabilityScreen& screen) {
  return frozen_input_drift(eq, p, tires, screen.duration, screen.dt, screen.perturbation) > screen.ball;
}

EquilibriumPoint mirror(const EquilibriumPoint& eq) {
  EquilibriumPoint m = eq;
  m.dyn.beta = -eq.dyn.beta;
  m.dyn.psidot = -eq.dyn.psidot;
  m.input.delta = -eq.input.delta;
  m.radius = -eq.radius;
  return m;
}

}  // namespace driftplan::esm
