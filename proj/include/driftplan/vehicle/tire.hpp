#pragma once

#include "driftplan/vehicle/types.hpp"

namespace driftplan::vehicle {

// Theoretical slips from longitudinal slip and slip angle.
// Throws DomainError if lambda <= -1 or |alpha| >= pi/2.
SlipState theoretical_slips(double lambda, double alpha);

// Magnitude of the isotropic friction curve at combined slip sigma >= 0.
double mf_magnitude(double sigma, const TireParams& tires);

// Directional friction coefficients. The vector (mu_x, mu_y) is parallel to
// (sigma_x, sigma_y); at zero slip both components are exactly zero.
Friction mf_friction(const SlipState& slips, const TireParams& tires);

// Slope d(mu)/d(sigma) of the friction curve at the origin (= B*C*D).
double mf_origin_slope(const TireParams& tires);

}  // namespace driftplan::vehicle
