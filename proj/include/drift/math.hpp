#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drift {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kGravity = 9.81;  // m/s^2

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w = kPi;
  return w;
}

inline double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

inline double sq(double v) { return v * v; }

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

/// Cubic smoothstep on [0, 1]; clamped outside.
inline double smoothstep01(double t) {
  t = clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

/// Linear interpolation between samples of a uniformly spaced sequence.
/// `pos` is a fractional index into [0, n-1].
template <typename Getter>
double lerp_at(Getter&& value_at, int n, double pos) {
  if (n == 1) return value_at(0);
  pos = clamp(pos, 0.0, static_cast<double>(n - 1));
  const int i = std::min(static_cast<int>(pos), n - 2);
  const double f = pos - i;
  return (1.0 - f) * value_at(i) + f * value_at(i + 1);
}

}  // namespace drift
