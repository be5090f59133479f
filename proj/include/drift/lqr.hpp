#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "drift/integrate.hpp"
#include "drift/trim.hpp"
#include "drift/vehicle.hpp"

namespace drift {

/// Infinite-horizon discrete LQR gain via Riccati iteration to a fixed
/// point. Throws if the iteration diverges (uncontrollable linearization).
inline Eigen::MatrixXd dare_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                 const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                 double tol = 1e-9, int max_iter = 200000) {
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd G = (R + BtP * B).ldlt().solve(BtP * A);
    const Eigen::MatrixXd Pn =
        Q + A.transpose() * P * A - A.transpose() * P * B * G;
    const double diff = (Pn - P).cwiseAbs().maxCoeff();
    P = 0.5 * (Pn + Pn.transpose());
    if (!P.allFinite() || P.cwiseAbs().maxCoeff() > 1e14)
      throw std::runtime_error("dare_gain: Riccati iteration diverged");
    if (diff < tol) {
      const Eigen::MatrixXd BtP2 = B.transpose() * P;
      return (R + BtP2 * B).ldlt().solve(BtP2 * A);
    }
  }
  throw std::runtime_error("dare_gain: Riccati iteration did not converge");
}

/// LQ weights for the spin-up controller.
struct SpinupWeights {
  double q_r = 1.0;
  double q_beta = 2.0;
  double q_V = 1.0;
  double r_delta = 2.0;
  double r_omega = 2e-5;
};

/// Linear state feedback around a reduced operating point:
/// u = u0 - K (x - x0), clamped to the actuation box.
struct SpinupGains {
  ReducedState operating_point;
  ControlInput trim;        // u0
  Eigen::Matrix<double, 2, 3> K;

  ControlInput apply(const ReducedState& x, const VehicleParams& p) const {
    Eigen::Vector3d e(x.r - operating_point.r, wrap_angle(x.beta - operating_point.beta),
                      x.V - operating_point.V);
    const Eigen::Vector2d du = K * e;
    return clamp_input({trim.delta - du[0], trim.omega - du[1]}, p);
  }
};

/// Linearizes the discrete reduced-model step at the operating point by
/// central finite differences and solves the infinite-horizon LQ problem.
inline SpinupGains spinup_gains(const ReducedState& op, const VehicleParams& p,
                                const SimParams& sim = {},
                                const SpinupWeights& w = {}) {
  if (!(op.V >= sim.v_guard))
    throw std::invalid_argument("spinup_gains: operating point below low-speed guard");
  const ControlInput u0 = trim_input(op, p);

  auto step = [&](const Eigen::Vector3d& x, const Eigen::Vector2d& u) {
    const ReducedState out =
        reduced_step({x[0], x[1], x[2]}, {u[0], u[1]}, p, sim.dt, sim.v_guard);
    return Eigen::Vector3d(out.r, out.beta, out.V);
  };
  const Eigen::Vector3d x0(op.r, op.beta, op.V);
  const Eigen::Vector2d uv(u0.delta, u0.omega);
  Eigen::Matrix3d A;
  Eigen::Matrix<double, 3, 2> B;
  const double hx = 1e-6;
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d xp = x0, xm = x0;
    xp[c] += hx;
    xm[c] -= hx;
    A.col(c) = (step(xp, uv) - step(xm, uv)) / (2 * hx);
  }
  const Eigen::Vector2d hu(1e-6, 1e-4);
  for (int c = 0; c < 2; ++c) {
    Eigen::Vector2d up = uv, um = uv;
    up[c] += hu[c];
    um[c] -= hu[c];
    B.col(c) = (step(x0, up) - step(x0, um)) / (2 * hu[c]);
  }

  Eigen::Matrix3d Q = Eigen::Vector3d(w.q_r, w.q_beta, w.q_V).asDiagonal();
  Eigen::Matrix2d R = Eigen::Vector2d(w.r_delta, w.r_omega).asDiagonal();
  SpinupGains g;
  g.operating_point = op;
  g.trim = u0;
  g.K = dare_gain(A, B, Q, R);
  return g;
}

}  // namespace drift
