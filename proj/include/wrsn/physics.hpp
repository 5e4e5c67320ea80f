#pragma once

// Closed-form wireless charging and motion power models. All functions are
// pure and reentrant.

#include <cmath>
#include <string>

#include "wrsn/errors.hpp"

namespace wrsn::physics {

/// Lumped RF charging model: mu(d) = alpha / (d + beta)^2, cut off beyond d_max.
struct ChargingParams {
  double alpha_lumped = 36.0;   // dimensionless
  double beta_offset = 30.0;    // m
  double d_max = 6.0;           // m, effective charging radius (inclusive)
  double p0 = 3.0;              // W, transmit power
  double rx_threshold = 0.005;  // W, enforced by the world when harvesting
};

/// Rotary-wing propulsion power parameters.
struct AavPowerParams {
  double blade_power = 79.86;     // W
  double induced_power = 88.63;   // W
  double tip_speed = 120.0;       // m/s
  double induced_velocity = 4.03; // m/s, mean rotor induced velocity in hover
  double drag_coeff = 0.6;
  double air_density = 1.225;     // kg/m^3
  double rotor_solidity = 0.05;
  double rotor_area = 0.503;      // m^2
};

/// Ground vehicle DC motor power: k1 v^2 + k2 v + k3.
struct SvPowerParams {
  double k1 = 0.3;   // W s^2/m^2
  double k2 = 0.04;  // W s/m
  double k3 = 10.0;  // W
};

namespace detail {
inline void require_non_negative(double value, const char* what) {
  if (!(value >= 0.0)) {
    throw DomainError(std::string(what) + " must be non-negative, got " + std::to_string(value));
  }
}
}  // namespace detail

inline double charging_efficiency(const ChargingParams& params, double distance) {
  detail::require_non_negative(distance, "distance");
  const double denom = distance + params.beta_offset;
  return params.alpha_lumped / (denom * denom);
}

/// Received power at a node `distance` metres from the transmitter. The
/// boundary d == d_max still charges.
inline double received_power(const ChargingParams& params, double distance) {
  detail::require_non_negative(distance, "distance");
  if (distance > params.d_max) return 0.0;
  return params.p0 * charging_efficiency(params, distance);
}

inline double aav_motion_power(const AavPowerParams& p, double speed) {
  detail::require_non_negative(speed, "speed");
  const double v2 = speed * speed;
  const double v4 = v2 * v2;
  const double vtip2 = p.tip_speed * p.tip_speed;
  const double v02 = p.induced_velocity * p.induced_velocity;
  const double blade = p.blade_power * (1.0 + 3.0 * v2 / vtip2);
  const double induced =
      p.induced_power * std::sqrt(std::sqrt(1.0 + v4 / (4.0 * v02 * v02)) - v2 / (2.0 * v02));
  const double parasite =
      0.5 * p.drag_coeff * p.air_density * p.rotor_solidity * p.rotor_area * v2 * speed;
  return blade + induced + parasite;
}

inline double sv_motion_power(const SvPowerParams& p, double speed) {
  detail::require_non_negative(speed, "speed");
  return p.k1 * speed * speed + p.k2 * speed + p.k3;
}

}  // namespace wrsn::physics
