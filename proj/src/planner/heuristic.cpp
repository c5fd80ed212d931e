#include "driftplan/planner/heuristic.hpp"

#include <algorithm>
#include <cmath>

namespace driftplan::planner {

namespace {

constexpr double kCurvatureWindow = 5.0;  // half-width of the |kappa| average [m]
constexpr double kCornerDt = 0.1;         // integration step of the corner estimate [s]

}  // namespace

double bang_bang_distance(double v, double t_rem, double a_max, double v_max) {
  if (t_rem <= 0.0) return 0.0;
  if (v >= v_max) return v * t_rem;
  const double t1 = std::min(t_rem, (v_max - v) / a_max);
  return v * t1 + 0.5 * a_max * t1 * t1 + v_max * (t_rem - t1);
}

ProgressBound::ProgressBound(const track::Track& track, double d_lim, double a_max, double v_max, double a_lat)
    : track_(&track), a_max_(a_max), v_max_(v_max), length_(track.length()), closed_(track.closed()) {
  s_ = track.arc_length();
  const auto& th = track.headings();
  const std::size_t n = s_.size();

  phi_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double ds = s_[i] - s_[i - 1];
    const double dth = std::abs(th[i] - th[i - 1]);
    phi_[i] = phi_[i - 1] + std::max(ds * std::cos(dth) - d_lim * dth, 1e-3 * ds);
  }

  // Smoothed |kappa| -> speed cap -> backward braking pass.
  const auto& kappa = track.curvatures();
  std::vector<double> cap(n, v_max);
  if (a_lat > 0.0) {
    std::vector<double> prefix(n + 1, 0.0);  // integral of |kappa| ds up to vertex i
    for (std::size_t i = 1; i < n; ++i) {
      prefix[i] = prefix[i - 1] + 0.5 * (std::abs(kappa[i]) + std::abs(kappa[i - 1])) * (s_[i] - s_[i - 1]);
    }
    auto integral = [&](double a, double b) {
      // |kappa| integral over [a, b] (unwrapped), sampled at vertices.
      auto at = [&](double s) {
        double lap = 0.0;
        if (closed_) {
          lap = std::floor(s / length_);
          s -= lap * length_;
        } else {
          s = std::clamp(s, 0.0, length_);
        }
        const auto it = std::upper_bound(s_.begin(), s_.end(), s);
        std::size_t i = (it == s_.begin()) ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
        i = std::min(i, n - 2);
        const double u = (s - s_[i]) / (s_[i + 1] - s_[i]);
        return lap * prefix[n - 1] + prefix[i] + u * (prefix[i + 1] - prefix[i]);
      };
      return at(b) - at(a);
    };
    for (std::size_t i = 0; i < n; ++i) {
      double lo = s_[i] - kCurvatureWindow, hi = s_[i] + kCurvatureWindow;
      if (!closed_) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, length_);
      }
      const double k_avg = integral(lo, hi) / (hi - lo);
      if (k_avg > 1e-9) cap[i] = std::min(v_max, std::sqrt(a_lat / k_avg));
    }
  }
  vprof_ = cap;
  const int passes = closed_ ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t j = n - 1; j-- > 0;) {
      const double ds = s_[j + 1] - s_[j];
      vprof_[j] = std::min(vprof_[j], std::sqrt(vprof_[j + 1] * vprof_[j + 1] + 2.0 * a_max * ds));
    }
    if (closed_) vprof_[n - 1] = std::min(vprof_[n - 1], vprof_[0]);
  }
  if (closed_) vprof_[0] = vprof_[n - 1] = std::min(vprof_[0], vprof_[n - 1]);
}

double ProgressBound::phi(double s) const {
  const std::size_t n = s_.size();
  double base = 0.0;
  if (closed_) {
    const double lap = std::floor(s / length_);
    base = lap * phi_.back();
    s -= lap * length_;
  } else if (s < 0.0) {
    return s;
  } else if (s > length_) {
    return phi_.back() + (s - length_);
  }
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = (it == s_.begin()) ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  i = std::min(i, n - 2);
  const double u = (s - s_[i]) / (s_[i + 1] - s_[i]);
  return base + phi_[i] + u * (phi_[i + 1] - phi_[i]);
}

double ProgressBound::phi_inverse(double value) const {
  const std::size_t n = s_.size();
  double base = 0.0;
  if (closed_) {
    const double lap = std::floor(value / phi_.back());
    base = lap * length_;
    value -= lap * phi_.back();
  } else if (value < 0.0) {
    return value;
  } else if (value > phi_.back()) {
    return length_ + (value - phi_.back());
  }
  const auto it = std::upper_bound(phi_.begin(), phi_.end(), value);
  std::size_t i = (it == phi_.begin()) ? 0 : static_cast<std::size_t>(it - phi_.begin()) - 1;
  i = std::min(i, n - 2);
  const double u = (value - phi_[i]) / (phi_[i + 1] - phi_[i]);
  return base + s_[i] + u * (s_[i + 1] - s_[i]);
}

double ProgressBound::upper(double s, double v, double t_rem) const {
  const double D = bang_bang_distance(v, t_rem, a_max_, v_max_);
  if (D <= 0.0) return 0.0;
  // Never below D itself, whatever rounding does in the inversion.
  return std::max(D, phi_inverse(phi(s) + D) - s);
}

double ProgressBound::profile_at(double s) const {
  if (closed_) {
    s -= std::floor(s / length_) * length_;
  } else if (s < 0.0 || s > length_) {
    return v_max_;
  }
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = (it == s_.begin()) ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  i = std::min(i, s_.size() - 2);
  const double u = (s - s_[i]) / (s_[i + 1] - s_[i]);
  return vprof_[i] + u * (vprof_[i + 1] - vprof_[i]);
}

double ProgressBound::speed_profile(double s) const { return profile_at(s); }

double ProgressBound::corner(double s, double v, double t_rem) const {
  double pos = s, t = 0.0;
  while (t < t_rem - 1e-12) {
    const double dt = std::min(kCornerDt, t_rem - t);
    const double lim = profile_at(pos);
    const double v_new = (v < lim) ? std::min(v + a_max_ * dt, lim) : std::max(v - a_max_ * dt, lim);
    pos += 0.5 * (v + v_new) * dt;
    v = v_new;
    t += dt;
  }
  return pos - s;
}

}  // namespace driftplan::planner
