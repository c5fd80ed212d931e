#include "driftplan/vehicle/tire.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "driftplan/error.hpp"

namespace driftplan::vehicle {

void validate(const TireParams& t) {
  if (!(t.B > 0.0)) throw DomainError("tire: B must be positive");
  if (!(t.D > 0.0 && t.D <= 1.0)) throw DomainError("tire: D must lie in (0, 1]");
  if (!std::isfinite(t.C) || !std::isfinite(t.E)) throw DomainError("tire: C and E must be finite");
}

SlipState theoretical_slips(double lambda, double alpha) {
  if (!(lambda > -1.0)) {
    throw DomainError("theoretical_slips: lambda must be > -1, got " + std::to_string(lambda));
  }
  if (!(std::abs(alpha) < std::numbers::pi / 2.0)) {
    throw DomainError("theoretical_slips: |alpha| must be < pi/2, got " + std::to_string(alpha));
  }
  SlipState s;
  s.sigma_x = lambda / (1.0 + lambda);
  s.sigma_y = std::tan(alpha) / (1.0 + lambda);
  s.sigma = std::hypot(s.sigma_x, s.sigma_y);
  return s;
}

double mf_magnitude(double sigma, const TireParams& t) {
  const double sb = sigma * t.B;
  return t.D * std::sin(t.C * std::atan(sb - t.E * (sb - std::atan(sb))));
}

Friction mf_friction(const SlipState& slips, const TireParams& tires) {
  if (slips.sigma == 0.0) return {};
  const double mag = mf_magnitude(slips.sigma, tires);
  return {slips.sigma_x / slips.sigma * mag, slips.sigma_y / slips.sigma * mag};
}

double mf_origin_slope(const TireParams& t) { return t.B * t.C * t.D; }

}  // namespace driftplan::vehicle
