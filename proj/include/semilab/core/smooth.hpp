#pragma once

#include <numbers>

namespace semilab::core {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// C^∞ monotone transition built from exp(-1/x): 0 for t ≤ 0, 1 for t ≥ 1.
double smooth_transition(double t);

/// The plateau cutoff j: j(r) = 0 for r ≤ 1/2 and j(r) = 1 for r ≥ 1.
double j_step(double r);

/// Classic bump exp(1 - 1/(1 - t²)) on (-1, 1); peak value 1 at t = 0.
double classic_bump(double t);

/// Flat-top bump in |x|: 1 for |x| ≤ inner, 0 for |x| ≥ outer.
double plateau_bump(double x, double inner, double outer);

/// Reduce an angle to [0, 2π).
double wrap_angle(double theta);

/// Arc-length distance on the unit circle.
double circle_distance(double a, double b);

}  // namespace semilab::core
