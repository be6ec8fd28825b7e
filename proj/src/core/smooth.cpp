#include "semilab/core/smooth.hpp"

#include <algorithm>
#include <cmath>

namespace semilab::core {

namespace {
double exp_kernel(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace

double smooth_transition(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = exp_kernel(t);
  const double b = exp_kernel(1.0 - t);
  return a / (a + b);
}

double j_step(double r) { return smooth_transition(2.0 * r - 1.0); }

double classic_bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double plateau_bump(double x, double inner, double outer) {
  const double ax = std::abs(x);
  if (ax <= inner) return 1.0;
  if (ax >= outer) return 0.0;
  return 1.0 - smooth_transition((ax - inner) / (outer - inner));
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double circle_distance(double a, double b) {
  const double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

}  // namespace semilab::core
