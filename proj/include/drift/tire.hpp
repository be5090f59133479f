#pragma once

#include <cmath>
#include <stdexcept>

#include "drift/vehicle.hpp"

namespace drift {

/// Friction force components in the wheel frame (front/rear, long/lat).
struct TireForces {
  double ffx = 0.0;
  double ffy = 0.0;
  double frx = 0.0;
  double fry = 0.0;
};

struct AxleForce {
  double fx = 0.0;
  double fy = 0.0;
};

// Floor on the slip normalization denominator, m/s.
inline constexpr double kSlipDenomFloor = 0.01;

/// Isotropic combined-slip magic formula for one axle (or one wheel).
/// `v_wx`, `v_wy` are the contact-point velocity in the wheel frame and
/// `omega` the wheel rotational speed. The total force magnitude is
/// mu_eff * D * sin(C atan(B s)) * normal_load, decomposed proportionally
/// to the slip components, so it never exceeds the friction circle.
inline AxleForce combined_slip_force(double v_wx, double v_wy, double omega,
                                     const VehicleParams& p, double normal_load,
                                     double mu_eff) {
  const double v_spin = omega * p.wheel_radius;
  const double denom = std::max({std::abs(v_spin), std::abs(v_wx), kSlipDenomFloor});
  const double sx = (v_spin - v_wx) / denom;
  const double sy = v_wy / denom;
  const double s = std::hypot(sx, sy);
  if (s < 1e-12) return {0.0, 0.0};
  const double f =
      mu_eff * p.pacejka_D * std::sin(p.pacejka_C * std::atan(p.pacejka_B * s)) * normal_load;
  return {f * sx / s, -f * sy / s};
}

/// Per-axle wheel-frame friction forces of the single-track model. Both
/// axles share the same wheel speed (locked differential, 4WD).
inline TireForces tire_forces(const ReducedState& rs, const ControlInput& u,
                              const VehicleParams& p) {
  if (!(rs.V > 0.0)) throw std::invalid_argument("tire_forces: requires V > 0");
  const double vx = rs.V * std::cos(rs.beta);
  const double vy = rs.V * std::sin(rs.beta);
  // Contact velocities in the body frame.
  const double vfx_b = vx;
  const double vfy_b = vy + p.lf * rs.r;
  const double vrx_b = vx;
  const double vry_b = vy - p.lr * rs.r;
  // Front wheel frame is the body frame rotated by delta.
  const double cd = std::cos(u.delta), sd = std::sin(u.delta);
  const double vfx_w = cd * vfx_b + sd * vfy_b;
  const double vfy_w = -sd * vfx_b + cd * vfy_b;

  const AxleForce front =
      combined_slip_force(vfx_w, vfy_w, u.omega, p, p.front_load(), p.mu);
  const AxleForce rear =
      combined_slip_force(vrx_b, vry_b, u.omega, p, p.rear_load(), p.mu);
  return {front.fx, front.fy, rear.fx, rear.fy};
}

}  // namespace drift
