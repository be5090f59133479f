#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "drift/tire.hpp"
#include "drift/vehicle.hpp"

namespace drift {

/// Verification-grade four-wheel model state: pose/velocity core plus
/// per-wheel relaxed lateral slip, first-order actuator lag states, and the
/// pure-delay command FIFO. Wheel order: FL, FR, RL, RR.
struct HiFiState {
  FullState core;
  std::array<double, 4> slip_lat{};  // relaxed lateral slip, dimensionless
  double delta_eff = 0.0;
  double omega_eff = 0.0;
  std::vector<ControlInput> pending;  // FIFO of length round(delay/dt)

  double speed() const { return core.speed(); }
};

/// Time derivative of the continuous part of HiFiState (the FIFO advances
/// per control tick, not continuously).
struct HiFiDerivative {
  FullState core;
  std::array<double, 4> slip_lat{};
  double delta_eff = 0.0;
  double omega_eff = 0.0;
};

namespace detail {
struct WheelGeometry {
  double px, py;     // contact position in body frame, m
  bool steered;
  double load_frac;  // fraction of m g carried
};

inline std::array<WheelGeometry, 4> wheel_layout(const VehicleParams& p,
                                                 const HiFiParams& h) {
  const double hw = 0.5 * h.track_width;
  const double ff = 0.5 * p.lr / p.wheelbase();  // per front wheel
  const double fr = 0.5 * p.lf / p.wheelbase();  // per rear wheel
  return {{{p.lf, hw, true, ff},
           {p.lf, -hw, true, ff},
           {-p.lr, hw, false, fr},
           {-p.lr, -hw, false, fr}}};
}

/// Kinematic (un-relaxed) slip components of one wheel in its own frame.
struct WheelSlip {
  double sx, sy;
  double contact_speed;
};

inline WheelSlip wheel_slip(const WheelGeometry& g, double vx, double vy, double r,
                            double delta, double omega, const VehicleParams& p) {
  const double vwx_b = vx - r * g.py;
  const double vwy_b = vy + r * g.px;
  double vwx = vwx_b, vwy = vwy_b;
  if (g.steered) {
    const double cd = std::cos(delta), sd = std::sin(delta);
    vwx = cd * vwx_b + sd * vwy_b;
    vwy = -sd * vwx_b + cd * vwy_b;
  }
  const double v_spin = omega * p.wheel_radius;
  const double denom = std::max({std::abs(v_spin), std::abs(vwx), kSlipDenomFloor});
  return {(v_spin - vwx) / denom, vwy / denom, std::hypot(vwx, vwy)};
}
}  // namespace detail

/// Four-wheel dynamics under the *effective* (post-delay, post-lag) command
/// `delayed`. `perturbation` scales the friction coefficient to emulate a
/// reality gap. Regular at V = 0; rejects non-finite states.
inline HiFiDerivative hifi_derivative(const HiFiState& s, const ControlInput& delayed,
                                      const VehicleParams& p, const HiFiParams& h,
                                      double perturbation) {
  if (!std::isfinite(s.core.x) || !std::isfinite(s.core.xdot) || !std::isfinite(s.core.ydot))
    throw std::invalid_argument("hifi_derivative: non-finite state");
  if (!(perturbation > 0.0))
    throw std::invalid_argument("hifi_derivative: perturbation must be positive");

  const double cpsi = std::cos(s.core.psi), spsi = std::sin(s.core.psi);
  // Body-frame CoM velocity.
  const double vx = cpsi * s.core.xdot + spsi * s.core.ydot;
  const double vy = -spsi * s.core.xdot + cpsi * s.core.ydot;
  const double r = s.core.psidot;
  const double mu_eff = p.mu * perturbation;

  const auto wheels = detail::wheel_layout(p, h);
  double fx_b = 0.0, fy_b = 0.0, mz = 0.0;
  HiFiDerivative d;
  for (int i = 0; i < 4; ++i) {
    const auto& g = wheels[i];
    const auto slip = detail::wheel_slip(g, vx, vy, r, s.delta_eff, s.omega_eff, p);
    // Lateral slip builds up over the relaxation length; longitudinal slip
    // acts instantaneously.
    double sy = slip.sy;
    if (h.slip_relaxation > 1e-9) {
      sy = s.slip_lat[i];
      d.slip_lat[i] =
          (slip.sy - sy) * std::max(slip.contact_speed, 0.1) / h.slip_relaxation;
    } else {
      d.slip_lat[i] = 0.0;
    }
    const double stot = std::hypot(slip.sx, sy);
    double fwx = 0.0, fwy = 0.0;
    if (stot > 1e-12) {
      const double load = g.load_frac * p.m * kGravity;
      const double f = mu_eff * p.pacejka_D *
                       std::sin(p.pacejka_C * std::atan(p.pacejka_B * stot)) * load;
      fwx = f * slip.sx / stot;
      fwy = -f * sy / stot;
    }
    double fxb = fwx, fyb = fwy;
    if (g.steered) {
      const double cd = std::cos(s.delta_eff), sd = std::sin(s.delta_eff);
      fxb = cd * fwx - sd * fwy;
      fyb = sd * fwx + cd * fwy;
    }
    fx_b += fxb;
    fy_b += fyb;
    mz += g.px * fyb - g.py * fxb;
  }

  d.core.x = s.core.xdot;
  d.core.y = s.core.ydot;
  d.core.psi = s.core.psidot;
  d.core.xdot = (cpsi * fx_b - spsi * fy_b) / p.m;
  d.core.ydot = (spsi * fx_b + cpsi * fy_b) / p.m;
  d.core.psidot = mz / p.Iz;
  if (h.actuator_lag > 1e-9) {
    d.delta_eff = (delayed.delta - s.delta_eff) / h.actuator_lag;
    d.omega_eff = (delayed.omega - s.omega_eff) / h.actuator_lag;
  } else {
    d.delta_eff = 0.0;  // handled as a direct assignment by the stepper
    d.omega_eff = 0.0;
  }
  return d;
}

}  // namespace drift
