#pragma once

#include <vector>

#include "driftplan/planner/config.hpp"
#include "driftplan/track/track.hpp"

namespace driftplan::planner {

// Distance covered in time t_rem from speed v when accelerating at a_max up
// to v_max and holding it:
//   t1 = min(t_rem, (v_max - v) / a_max)
//   D  = v t1 + a_max t1^2 / 2 + v_max (t_rem - t1)
// Speeds above v_max are held, not reduced.
double bang_bang_distance(double v, double t_rem, double a_max, double v_max);

// Road-progress bounds along one track.
//
// upper(): the bang-bang distance D measured along the centerline cannot be
// beaten by cutting corners. With Phi(s) = sum over segments of
// ds cos(dtheta/2) - d_lim |dtheta|, a point moving at speed v advances Phi
// at most at rate v, so s can grow at most to Phi^-1(Phi(s0) + D).
//
// corner(): a non-admissible estimate that also respects a speed cap
// sqrt(a_lat (1/|kappa| + d_lim)) with braking at a_max ahead of corners.
class ProgressBound {
 public:
  ProgressBound() = default;
  ProgressBound(const track::Track& track, double d_lim, double a_max, double v_max, double a_lat);

  double upper(double s, double v, double t_rem) const;
  double corner(double s, double v, double t_rem) const;

  // Corner speed profile at s (after braking), for plots and tests.
  double speed_profile(double s) const;

 private:
  double phi(double s_unwrapped) const;
  double phi_inverse(double value) const;
  double profile_at(double s_unwrapped) const;

  const track::Track* track_ = nullptr;
  std::vector<double> s_;    // vertex arc lengths
  std::vector<double> phi_;  // Phi at the vertices
  std::vector<double> vprof_;
  double a_max_ = 0.0;
  double v_max_ = 0.0;
  double length_ = 0.0;
  bool closed_ = false;
};

}  // namespace driftplan::planner
