#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "drift/dynamics.hpp"
#include "drift/vehicle.hpp"

namespace drift {

namespace detail {
inline Eigen::Vector3d reduced_residual(const ReducedState& x, const ControlInput& u,
                                        const VehicleParams& p) {
  ReducedState g = x;
  g.V = std::max(g.V, 0.05);
  const ReducedDerivative d = reduced_derivative(g, u, p, 0.05);
  return {d.rdot, d.betadot, d.Vdot};
}
}  // namespace detail

/// Input that best holds a reduced state (least-squares residual of the
/// reduced dynamics). Coarse grid scan followed by damped Gauss-Newton;
/// deterministic.
inline ControlInput trim_input(const ReducedState& x, const VehicleParams& p) {
  ControlInput best;
  double best_cost = std::numeric_limits<double>::infinity();
  const int nd = 25, no = 41;
  for (int i = 0; i < nd; ++i) {
    const double delta = -p.delta_max + 2.0 * p.delta_max * i / (nd - 1);
    for (int j = 0; j < no; ++j) {
      const double omega = p.omega_max * j / (no - 1);
      const double c = detail::reduced_residual(x, {delta, omega}, p).squaredNorm();
      if (c < best_cost) {
        best_cost = c;
        best = {delta, omega};
      }
    }
  }
  // Gauss-Newton refinement with step halving.
  Eigen::Vector2d u(best.delta, best.omega);
  for (int it = 0; it < 60; ++it) {
    const ControlInput cu{u[0], u[1]};
    const Eigen::Vector3d r0 = detail::reduced_residual(x, cu, p);
    if (r0.squaredNorm() < 1e-20) break;
    Eigen::Matrix<double, 3, 2> J;
    const double hd = 1e-6, ho = 1e-4;
    J.col(0) = (detail::reduced_residual(x, {u[0] + hd, u[1]}, p) -
                detail::reduced_residual(x, {u[0] - hd, u[1]}, p)) /
               (2 * hd);
    J.col(1) = (detail::reduced_residual(x, {u[0], u[1] + ho}, p) -
                detail::reduced_residual(x, {u[0], u[1] - ho}, p)) /
               (2 * ho);
    const Eigen::Matrix2d H = J.transpose() * J + 1e-12 * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d step = H.ldlt().solve(-J.transpose() * r0);
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 12; ++ls) {
      Eigen::Vector2d cand = u + alpha * step;
      cand[0] = clamp(cand[0], -p.delta_max, p.delta_max);
      cand[1] = clamp(cand[1], 0.0, p.omega_max);
      if (detail::reduced_residual(x, {cand[0], cand[1]}, p).squaredNorm() <
          r0.squaredNorm() * (1.0 - 1e-10)) {
        u = cand;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  return {u[0], u[1]};
}

/// Steady drift condition on a circle: reduced state, input, and the
/// residual norm achieved. beta_ref's sign encodes the travel direction
/// (positive for clockwise).
struct CircleTrim {
  ReducedState state;
  ControlInput input;
  double residual = 0.0;
};

/// Solves d/dt (r, beta, V) = 0 with beta = beta_ref and V = |r| R over
/// (r, delta, omega). Deterministic damped Newton from the geometric
/// initial guess; refines with trim_input scans if needed.
inline CircleTrim circle_trim(double radius, double beta_ref, const VehicleParams& p,
                              double v_hint = 1.9) {
  const double dir = beta_ref > 0 ? -1.0 : 1.0;  // clockwise circles have r < 0
  auto pack_state = [&](double r) {
    return ReducedState{r, beta_ref, std::abs(r) * radius};
  };
  Eigen::Vector3d z(dir * v_hint / radius, 0.0, 0.6 * p.omega_max);
  {
    // Seed (delta, omega) from the input trim at the geometric state.
    const ControlInput u0 = trim_input(pack_state(z[0]), p);
    z[1] = u0.delta;
    z[2] = u0.omega;
  }
  auto residual = [&](const Eigen::Vector3d& v) {
    return detail::reduced_residual(pack_state(v[0]), {v[1], v[2]}, p);
  };
  for (int it = 0; it < 80; ++it) {
    const Eigen::Vector3d r0 = residual(z);
    if (r0.norm() < 1e-11) break;
    Eigen::Matrix3d J;
    const Eigen::Vector3d h(1e-6, 1e-6, 1e-4);
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d zp = z, zm = z;
      zp[c] += h[c];
      zm[c] -= h[c];
      J.col(c) = (residual(zp) - residual(zm)) / (2 * h[c]);
    }
    const Eigen::Vector3d step =
        (J.transpose() * J + 1e-12 * Eigen::Matrix3d::Identity())
            .ldlt()
            .solve(-J.transpose() * r0);
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 14; ++ls) {
      Eigen::Vector3d cand = z + alpha * step;
      cand[1] = clamp(cand[1], -p.delta_max, p.delta_max);
      cand[2] = clamp(cand[2], 0.0, p.omega_max);
      if (residual(cand).squaredNorm() < r0.squaredNorm() * (1.0 - 1e-12)) {
        z = cand;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  CircleTrim out;
  out.state = pack_state(z[0]);
  out.input = {z[1], z[2]};
  out.residual = residual(z).norm();
  return out;
}

}  // namespace drift
