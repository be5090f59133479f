#pragma once

#include <cmath>
#include <stdexcept>

#include "drift/tire.hpp"
#include "drift/vehicle.hpp"

namespace drift {

struct ReducedDerivative {
  double rdot = 0.0;
  double betadot = 0.0;
  double Vdot = 0.0;
};

/// Single-track reduced-order dynamics d/dt (r, beta, V). Singular at V = 0
/// (betadot divides by m V); rejects speeds below the guard.
inline ReducedDerivative reduced_derivative(const ReducedState& rs, const ControlInput& u,
                                            const VehicleParams& p,
                                            double v_guard = SimParams{}.v_guard) {
  if (!(rs.V >= v_guard))
    throw std::invalid_argument("reduced_derivative: V below low-speed guard");
  const TireForces f = tire_forces(rs, u, p);
  const double cd = std::cos(u.delta), sd = std::sin(u.delta);
  const double cdb = std::cos(u.delta - rs.beta), sdb = std::sin(u.delta - rs.beta);
  const double cb = std::cos(rs.beta), sb = std::sin(rs.beta);
  ReducedDerivative d;
  d.rdot = (p.lf * (f.ffy * cd + f.ffx * sd) - p.lr * f.fry) / p.Iz;
  d.betadot = (f.ffy * cdb + f.ffx * sdb + f.fry * cb - f.frx * sb) / (p.m * rs.V) - rs.r;
  d.Vdot = (-f.ffy * sdb + f.ffx * cdb + f.fry * sb + f.frx * cb) / p.m;
  return d;
}

/// Full-state dynamics: reduced model composed with the kinematic map
/// xdot = V cos(beta+psi), ydot = V sin(beta+psi), psidot = r.
/// The returned struct holds d/dt of every FullState field.
inline FullState full_derivative(const FullState& s, const ControlInput& u,
                                 const VehicleParams& p,
                                 double v_guard = SimParams{}.v_guard) {
  const ReducedState rs = reduce(s);
  const ReducedDerivative rd = reduced_derivative(rs, u, p, v_guard);
  const double course = rs.beta + s.psi;
  const double cc = std::cos(course), sc = std::sin(course);
  FullState d;
  d.x = rs.V * cc;
  d.y = rs.V * sc;
  d.psi = rs.r;
  d.xdot = rd.Vdot * cc - rs.V * sc * (rd.betadot + rs.r);
  d.ydot = rd.Vdot * sc + rs.V * cc * (rd.betadot + rs.r);
  d.psidot = rd.rdot;
  return d;
}

/// Kinematic-bicycle fallback used below the low-speed guard, where the
/// dynamic model is singular. Longitudinal speed relaxes toward the wheel
/// rolling speed under a traction-limited acceleration; the velocity vector
/// and yaw rate relax toward the kinematic-bicycle field.
inline FullState launch_derivative(const FullState& s, const ControlInput& u,
                                   const VehicleParams& p) {
  constexpr double k_spin = 8.0;    // 1/s, speed relaxation toward rolling speed
  constexpr double k_align = 20.0;  // 1/s, velocity/yaw alignment relaxation
  const double v = s.speed();
  const double beta_kin = std::atan(p.lr * std::tan(u.delta) / p.wheelbase());
  const double course = s.psi + beta_kin;
  const double a_max = p.mu * p.pacejka_D * kGravity;
  const double a_long = clamp(k_spin * (u.omega * p.wheel_radius - v), -a_max, a_max);
  const double yaw_rate_kin = v * std::tan(u.delta) * std::cos(beta_kin) / p.wheelbase();
  const double cc = std::cos(course), sc = std::sin(course);
  FullState d;
  d.x = s.xdot;
  d.y = s.ydot;
  d.psi = s.psidot;
  d.xdot = a_long * cc + k_align * (v * cc - s.xdot);
  d.ydot = a_long * sc + k_align * (v * sc - s.ydot);
  d.psidot = k_align * (yaw_rate_kin - s.psidot);
  return d;
}

/// Simulation-grade bicycle derivative, defined for all speeds: the dynamic
/// model above the blend region, the kinematic fallback below the guard,
/// and a smooth blend in between.
inline FullState bicycle_sim_derivative(const FullState& s, const ControlInput& u,
                                        const VehicleParams& p, const SimParams& sim) {
  const double v = s.speed();
  if (v >= sim.v_blend) return full_derivative(s, u, p, sim.v_guard);
  const FullState low = launch_derivative(s, u, p);
  if (v < sim.v_guard) return low;
  const double w = smoothstep01((v - sim.v_guard) / (sim.v_blend - sim.v_guard));
  const FullState high = full_derivative(s, u, p, sim.v_guard);
  FullState d;
  d.x = (1.0 - w) * low.x + w * high.x;
  d.y = (1.0 - w) * low.y + w * high.y;
  d.psi = (1.0 - w) * low.psi + w * high.psi;
  d.xdot = (1.0 - w) * low.xdot + w * high.xdot;
  d.ydot = (1.0 - w) * low.ydot + w * high.ydot;
  d.psidot = (1.0 - w) * low.psidot + w * high.psidot;
  return d;
}

}  // namespace drift
