#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "drift/math.hpp"
#include "drift/textio.hpp"

namespace drift {

/// World-frame pose plus velocities; the simulator's ground truth.
struct FullState {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double psi = 0.0;    // yaw, wrapped to (-pi, pi]
  double xdot = 0.0;   // m/s
  double ydot = 0.0;   // m/s
  double psidot = 0.0; // rad/s

  double speed() const { return std::hypot(xdot, ydot); }
};

/// Steering angle and wheel rotational speed, the only actuation channel.
struct ControlInput {
  double delta = 0.0;  // rad
  double omega = 0.0;  // rad/s
};

/// Rotation/translation-invariant motion description (r, beta, V).
struct ReducedState {
  double r = 0.0;     // yaw rate, rad/s
  double beta = 0.0;  // sideslip, rad, wrapped to (-pi, pi]
  double V = 0.0;     // speed, m/s; the reduced model requires V > 0
};

struct VehicleParams {
  double m;             // kg
  double Iz;            // kg m^2
  double lf;            // m, CoM to front axle
  double lr;            // m, CoM to rear axle
  double wheel_radius;  // m
  double mu;            // friction scale, dimensionless
  double pacejka_B;
  double pacejka_C;
  double pacejka_D;
  double omega_max;     // rad/s
  double delta_max;     // rad

  double wheelbase() const { return lf + lr; }
  /// Static normal load on the front axle (lever arm of the rear).
  double front_load() const { return m * kGravity * lr / wheelbase(); }
  double rear_load() const { return m * kGravity * lf / wheelbase(); }

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("VehicleParams: ") + name +
                                    " must be strictly positive");
    };
    pos(m, "m");
    pos(Iz, "Iz");
    pos(lf, "lf");
    pos(lr, "lr");
    pos(wheel_radius, "wheel_radius");
    pos(mu, "mu");
    pos(pacejka_B, "pacejka_B");
    pos(pacejka_C, "pacejka_C");
    pos(pacejka_D, "pacejka_D");
    pos(omega_max, "omega_max");
    if (!(delta_max > 0.0 && delta_max < kPi / 2.0))
      throw std::invalid_argument("VehicleParams: delta_max must lie in (0, pi/2)");
  }
};

/// Four-wheel (verification) model extras: geometry, actuator delay/lag,
/// tire lateral-slip relaxation.
struct HiFiParams {
  double track_width = 0.18;      // m
  double actuator_delay = 0.03;   // s, pure delay
  double actuator_lag = 0.05;     // s, first-order time constant
  double slip_relaxation = 0.06;  // m, lateral slip relaxation length
};

/// Shared simulation constants.
struct SimParams {
  double dt = 0.01;        // s, control and integration step
  double v_guard = 0.05;   // m/s, reduced model singularity guard
  double v_blend = 0.15;   // m/s, upper edge of the low-speed blend region
};

inline ControlInput clamp_input(ControlInput u, const VehicleParams& p) {
  return {clamp(u.delta, -p.delta_max, p.delta_max), clamp(u.omega, 0.0, p.omega_max)};
}

/// Extracts (r, beta, V) from a full state. Below `v_tiny` the sideslip is
/// undefined and reported as 0.
inline ReducedState reduce(const FullState& s, double v_tiny = 1e-9) {
  ReducedState out;
  out.r = s.psidot;
  out.V = s.speed();
  out.beta = out.V > v_tiny ? wrap_angle(std::atan2(s.ydot, s.xdot) - s.psi) : 0.0;
  return out;
}

/// Builds the full state at a given pose whose motion matches a reduced state.
inline FullState embed(const ReducedState& rs, double x = 0.0, double y = 0.0,
                       double psi = 0.0) {
  FullState s;
  s.x = x;
  s.y = y;
  s.psi = wrap_angle(psi);
  const double course = s.psi + rs.beta;
  s.xdot = rs.V * std::cos(course);
  s.ydot = rs.V * std::sin(course);
  s.psidot = rs.r;
  return s;
}

inline VehicleParams vehicle_params_from_config(const Config& c) {
  VehicleParams p;
  p.m = c.get_double("vehicle.m");
  p.Iz = c.get_double("vehicle.Iz");
  p.lf = c.get_double("vehicle.lf");
  p.lr = c.get_double("vehicle.lr");
  p.wheel_radius = c.get_double("vehicle.wheel_radius");
  p.mu = c.get_double("vehicle.mu");
  p.pacejka_B = c.get_double("vehicle.pacejka_B");
  p.pacejka_C = c.get_double("vehicle.pacejka_C");
  p.pacejka_D = c.get_double("vehicle.pacejka_D");
  p.omega_max = c.get_double("vehicle.omega_max");
  p.delta_max = c.get_double("vehicle.delta_max");
  p.validate();
  return p;
}

inline HiFiParams hifi_params_from_config(const Config& c) {
  HiFiParams p;
  p.track_width = c.get_double("hifi.track_width", p.track_width);
  p.actuator_delay = c.get_double("hifi.actuator_delay", p.actuator_delay);
  p.actuator_lag = c.get_double("hifi.actuator_lag", p.actuator_lag);
  p.slip_relaxation = c.get_double("hifi.slip_relaxation", p.slip_relaxation);
  if (p.track_width <= 0.0 || p.actuator_delay < 0.0 || p.actuator_lag < 0.0 ||
      p.slip_relaxation < 0.0)
    throw std::invalid_argument("HiFiParams: invalid value in [hifi] section");
  return p;
}

}  // namespace drift
