#include "semilab/propagation/transport.hpp"

#include <cmath>
#include <numbers>

#include "semilab/core/errors.hpp"
#include "semilab/core/format.hpp"
#include "semilab/core/smooth.hpp"

namespace semilab::propagation {

using quasimodes::PolarGrid;
using quantization::cubic_convolution_weight;

namespace {

struct Support {
  double r_lo = 0.0, r_hi = 0.0, arc = 0.0;
  bool empty = true;
};

// Four taps with weights for a uniform axis; `periodic` wraps indices, otherwise taps
// outside [0, n) get weight 0.
struct Taps {
  int index[4];
  double weight[4];
};

Taps taps(double x, int n, bool periodic) {
  Taps t{};
  const int i0 = static_cast<int>(std::floor(x));
  for (int a = 0; a < 4; ++a) {
    int i = i0 - 1 + a;
    double w = cubic_convolution_weight(x - i);
    if (periodic) {
      i = ((i % n) + n) % n;
    } else if (i < 0 || i >= n) {
      w = 0.0;
      i = 0;
    }
    t.index[a] = i;
    t.weight[a] = w;
  }
  return t;
}

void check_preconditions(const Support& s, const CartesianGrid& target) {
  const double d = target.spacing();
  if (s.r_hi >= 0.9 * target.half_width)
    throw SupportEscapeError("polar_to_cartesian: polar support reaches r = " + core::fmt(s.r_hi) +
                             ", beyond the inner 95% of the box (|x| < " + core::fmt(0.9 * target.half_width) + ")");
  const double feature = std::min(s.r_hi - s.r_lo, s.arc * s.r_lo);
  if (feature < 4.0 * d)
    throw ResolutionError("polar_to_cartesian: narrowest polar feature " + core::fmt(feature) +
                          " spans fewer than 4 Cartesian spacings of " + core::fmt(d));
}

template <typename Sample>
TransportResult resample(const PolarGrid& pg, double h, double polar_norm_sq, const Support& support,
                         const CartesianGrid& target, Sample&& sample) {
  target.validate();
  TransportResult res;
  res.field = CartesianField(target, h);
  res.polar_norm = std::sqrt(polar_norm_sq);
  if (support.empty || polar_norm_sq == 0.0) return res;
  check_preconditions(support, target);
  const double dr = pg.dr(), dth = pg.dtheta();
  for (int i = 0; i < target.points; ++i) {
    const double x = target.coord(i);
    for (int j = 0; j < target.points; ++j) {
      const double y = target.coord(j);
      const double r = std::hypot(x, y);
      if (r < support.r_lo - 2.0 * dr || r > support.r_hi + 2.0 * dr) continue;
      const double th = core::wrap_angle(std::atan2(y, x));
      res.field.at(i, j) = sample(taps((r - pg.r_min) / dr, pg.n_r, false), taps(th / dth, pg.n_theta, true));
    }
  }
  res.cartesian_norm = res.field.norm();
  res.deficit = std::abs(1.0 - res.cartesian_norm * res.cartesian_norm / polar_norm_sq);
  if (res.deficit > 1e-4)
    throw ResolutionError("polar_to_cartesian: quadrature deficit " + core::fmt(res.deficit) +
                          " exceeds 1e-4; refine the Cartesian grid");
  res.field.normalize();
  return res;
}

Support support_of(const PolarGrid& g, const std::vector<bool>& radial, const std::vector<bool>& angular) {
  Support s;
  int first = -1, last = -1, count = 0;
  for (int i = 0; i < g.n_r; ++i)
    if (radial[i]) {
      if (first < 0) first = i;
      last = i;
    }
  for (int j = 0; j < g.n_theta; ++j) count += angular[j];
  if (first < 0 || count == 0) return s;
  s.empty = false;
  s.r_lo = g.r(first);
  s.r_hi = g.r(last);
  s.arc = count * g.dtheta();
  return s;
}

}  // namespace

TransportResult polar_to_cartesian(const quasimodes::SeparableField& u, const CartesianGrid& target) {
  const auto& g = u.grid;
  std::vector<bool> rad(g.n_r), ang(g.n_theta);
  for (int i = 0; i < g.n_r; ++i) rad[i] = u.radial[i] != cplx(0.0);
  for (int j = 0; j < g.n_theta; ++j) ang[j] = u.angular[j] != cplx(0.0);
  return resample(g, u.h, u.norm_squared(), support_of(g, rad, ang), target, [&](const Taps& tr, const Taps& tt) {
    cplx fr(0.0), gt(0.0);
    for (int a = 0; a < 4; ++a) fr += tr.weight[a] * u.radial[tr.index[a]];
    for (int b = 0; b < 4; ++b) gt += tt.weight[b] * u.angular[tt.index[b]];
    return fr * gt;
  });
}

TransportResult polar_to_cartesian(const quasimodes::PolarField& u, const CartesianGrid& target) {
  const auto& g = u.grid();
  std::vector<bool> rad(g.n_r, false), ang(g.n_theta, false);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j)
      if (u.at(i, j) != cplx(0.0)) rad[i] = ang[j] = true;
  return resample(g, u.h(), u.norm_squared(), support_of(g, rad, ang), target, [&](const Taps& tr, const Taps& tt) {
    cplx acc(0.0);
    for (int a = 0; a < 4; ++a) {
      if (tr.weight[a] == 0.0) continue;
      for (int b = 0; b < 4; ++b) acc += tr.weight[a] * tt.weight[b] * u.at(tr.index[a], tt.index[b]);
    }
    return acc;
  });
}

}  // namespace semilab::propagation
