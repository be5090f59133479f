#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "drift/dynamics.hpp"
#include "drift/fourwheel.hpp"
#include "drift/vehicle.hpp"

namespace drift {

namespace detail {
inline FullState axpy(const FullState& s, double a, const FullState& d) {
  return {s.x + a * d.x,       s.y + a * d.y,       s.psi + a * d.psi,
          s.xdot + a * d.xdot, s.ydot + a * d.ydot, s.psidot + a * d.psidot};
}

template <typename Deriv>
FullState rk4(const FullState& s, double dt, Deriv&& f) {
  const FullState k1 = f(s);
  const FullState k2 = f(axpy(s, 0.5 * dt, k1));
  const FullState k3 = f(axpy(s, 0.5 * dt, k2));
  const FullState k4 = f(axpy(s, dt, k3));
  FullState out = s;
  out.x += dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  out.y += dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
  out.psi += dt / 6.0 * (k1.psi + 2 * k2.psi + 2 * k3.psi + k4.psi);
  out.xdot += dt / 6.0 * (k1.xdot + 2 * k2.xdot + 2 * k3.xdot + k4.xdot);
  out.ydot += dt / 6.0 * (k1.ydot + 2 * k2.ydot + 2 * k3.ydot + k4.ydot);
  out.psidot += dt / 6.0 * (k1.psidot + 2 * k2.psidot + 2 * k3.psidot + k4.psidot);
  return out;
}
}  // namespace detail

/// One RK4 step of the bicycle model (strict dynamic model; throws below
/// the low-speed guard). Deterministic; psi re-wrapped after the step.
inline FullState integrate_step(const FullState& s, const ControlInput& u,
                                const VehicleParams& p, double dt,
                                double v_guard = SimParams{}.v_guard) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");
  FullState out = detail::rk4(
      s, dt, [&](const FullState& q) { return full_derivative(q, u, p, v_guard); });
  out.psi = wrap_angle(out.psi);
  return out;
}

/// One RK4 step of the reduced (r, beta, V) model; used by the trajectory
/// optimizer. The derivative is evaluated with V clamped to the guard so
/// solver rollouts cannot step into the singularity.
inline ReducedState reduced_step(const ReducedState& x, const ControlInput& u,
                                 const VehicleParams& p, double dt,
                                 double v_guard = SimParams{}.v_guard) {
  auto f = [&](const ReducedState& q) {
    ReducedState g = q;
    g.V = std::max(g.V, v_guard);
    const ReducedDerivative d = reduced_derivative(g, u, p, v_guard);
    return ReducedState{d.rdot, d.betadot, d.Vdot};
  };
  auto axpy = [](const ReducedState& s, double a, const ReducedState& d) {
    return ReducedState{s.r + a * d.r, s.beta + a * d.beta, s.V + a * d.V};
  };
  const ReducedState k1 = f(x);
  const ReducedState k2 = f(axpy(x, 0.5 * dt, k1));
  const ReducedState k3 = f(axpy(x, 0.5 * dt, k2));
  const ReducedState k4 = f(axpy(x, dt, k3));
  ReducedState out = x;
  out.r += dt / 6.0 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
  out.beta = wrap_angle(out.beta + dt / 6.0 * (k1.beta + 2 * k2.beta + 2 * k3.beta + k4.beta));
  out.V += dt / 6.0 * (k1.V + 2 * k2.V + 2 * k3.V + k4.V);
  return out;
}

/// One RK4 step of the four-wheel model at a fixed effective command; part
/// of the discrete hi-fi step below.
inline HiFiState integrate_step(const HiFiState& s, const ControlInput& delayed,
                                const VehicleParams& p, const HiFiParams& h,
                                double perturbation, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");
  auto axpy = [](const HiFiState& a, double c, const HiFiDerivative& d) {
    HiFiState out = a;
    out.core = detail::axpy(a.core, c, d.core);
    for (int i = 0; i < 4; ++i) out.slip_lat[i] += c * d.slip_lat[i];
    out.delta_eff += c * d.delta_eff;
    out.omega_eff += c * d.omega_eff;
    return out;
  };
  auto f = [&](const HiFiState& q) { return hifi_derivative(q, delayed, p, h, perturbation); };
  const HiFiDerivative k1 = f(s);
  const HiFiDerivative k2 = f(axpy(s, 0.5 * dt, k1));
  const HiFiDerivative k3 = f(axpy(s, 0.5 * dt, k2));
  const HiFiDerivative k4 = f(axpy(s, dt, k3));
  HiFiState out = s;
  auto acc = [&](double HiFiDerivative::*field) {
    return dt / 6.0 * (k1.*field + 2 * k2.*field + 2 * k3.*field + k4.*field);
  };
  out.core = detail::axpy(out.core, dt / 6.0, k1.core);
  out.core = detail::axpy(out.core, dt / 3.0, k2.core);
  out.core = detail::axpy(out.core, dt / 3.0, k3.core);
  out.core = detail::axpy(out.core, dt / 6.0, k4.core);
  for (int i = 0; i < 4; ++i)
    out.slip_lat[i] += dt / 6.0 *
                       (k1.slip_lat[i] + 2 * k2.slip_lat[i] + 2 * k3.slip_lat[i] + k4.slip_lat[i]);
  out.delta_eff += acc(&HiFiDerivative::delta_eff);
  out.omega_eff += acc(&HiFiDerivative::omega_eff);
  if (h.actuator_lag <= 1e-9) {
    out.delta_eff = delayed.delta;
    out.omega_eff = delayed.omega;
  }
  out.core.psi = wrap_angle(out.core.psi);
  return out;
}

/// Design-grade simulation platform: the dynamic bicycle model with the
/// kinematic low-speed fallback, stepped at the control rate.
class BicyclePlatform {
 public:
  BicyclePlatform(const VehicleParams& p, const SimParams& sim) : p_(p), sim_(sim) {}

  void reset(const FullState& s, const ControlInput& = {}) { state_ = s; }

  void step(const ControlInput& u_raw) {
    const ControlInput u = clamp_input(u_raw, p_);
    state_ = detail::rk4(state_, sim_.dt, [&](const FullState& q) {
      return bicycle_sim_derivative(q, u, p_, sim_);
    });
    state_.psi = wrap_angle(state_.psi);
  }

  const FullState& state() const { return state_; }
  ReducedState reduced() const { return reduce(state_); }
  const VehicleParams& params() const { return p_; }
  double dt() const { return sim_.dt; }

 private:
  VehicleParams p_;
  SimParams sim_;
  FullState state_;
};

/// Verification platform: four-wheel model with actuator delay/lag and a
/// friction perturbation. Commands pass through a FIFO of
/// round(delay / dt) entries before reaching the lag filter.
class FourWheelPlatform {
 public:
  FourWheelPlatform(const VehicleParams& p, const HiFiParams& h, const SimParams& sim,
                    double perturbation = 1.0)
      : p_(p), h_(h), sim_(sim), perturbation_(perturbation) {
    if (!(perturbation > 0.0))
      throw std::invalid_argument("FourWheelPlatform: perturbation must be positive");
  }

  /// Places the vehicle at `s` with all internal states primed to `u0`
  /// (lag states and FIFO), so a reset into a trimmed condition produces
  /// no actuation transient.
  void reset(const FullState& s, const ControlInput& u0 = {}) {
    state_.core = s;
    state_.delta_eff = u0.delta;
    state_.omega_eff = u0.omega;
    state_.slip_lat = {};
    const int len = static_cast<int>(std::lround(h_.actuator_delay / sim_.dt));
    state_.pending.assign(static_cast<size_t>(len), u0);
  }

  void step(const ControlInput& u_raw) {
    const ControlInput u = clamp_input(u_raw, p_);
    ControlInput delayed = u;
    if (!state_.pending.empty()) {
      delayed = state_.pending.front();
      state_.pending.erase(state_.pending.begin());
      state_.pending.push_back(u);
    }
    state_ = integrate_step(state_, delayed, p_, h_, perturbation_, sim_.dt);
  }

  const FullState& state() const { return state_.core; }
  const HiFiState& hifi_state() const { return state_; }
  ReducedState reduced() const { return reduce(state_.core); }
  const VehicleParams& params() const { return p_; }
  double dt() const { return sim_.dt; }
  double perturbation() const { return perturbation_; }

 private:
  VehicleParams p_;
  HiFiParams h_;
  SimParams sim_;
  double perturbation_;
  HiFiState state_;
};

}  // namespace drift
