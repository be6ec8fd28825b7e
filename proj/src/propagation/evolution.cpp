#include "semilab/propagation/evolution.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "semilab/core/errors.hpp"
#include "semilab/core/format.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/quantization/fft.hpp"

namespace semilab::propagation {

using quantization::Fft;

namespace {

double wavenumber(const CartesianGrid& g, int m) {
  const int s = m < g.points / 2 ? m : m - g.points;
  return std::numbers::pi * s / g.half_width;
}

// 1 in the interior, falling smoothly to 0 across `band` points at each edge.
std::vector<double> edge_mask(int n, double fraction) {
  std::vector<double> m(n, 1.0);
  if (fraction <= 0.0) return m;
  const int band = std::max(1, static_cast<int>(std::ceil(fraction * n)));
  for (int i = 0; i < n; ++i) {
    const int depth = std::max(band - i, i - (n - 1 - band));
    if (depth > 0) m[i] = 1.0 - core::smooth_transition(static_cast<double>(depth) / band);
  }
  return m;
}

void require_original(const CartesianField& u) {
  if (u.frame() != quantization::Frame::Original)
    throw std::invalid_argument("evolution works in the original frame only");
}

}  // namespace

std::vector<double> grid_potential(const CartesianGrid& grid, const core::PotentialModel& model) {
  std::vector<double> v(grid.size());
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.coord(i);
    for (int j = 0; j < grid.points; ++j) {
      const double y = grid.coord(j);
      const double r = std::hypot(x, y);
      const double angular = r > 0.5 ? model.v_inf(std::atan2(y, x)) * core::j_step(r) : 0.0;
      v[static_cast<std::size_t>(i) * grid.points + j] = angular + model.v_short(r);
    }
  }
  return v;
}

void check_momentum_resolution(const CartesianField& u, double tail_tol) {
  const auto& g = u.grid();
  std::vector<cplx> c = u.samples();
  Fft({g.points, g.points}).forward(c.data());
  double total = 0.0, high = 0.0;
  const int quarter = g.points / 4;
  for (int a = 0; a < g.points; ++a) {
    const int sa = std::abs(a < g.points / 2 ? a : a - g.points);
    for (int b = 0; b < g.points; ++b) {
      const int sb = std::abs(b < g.points / 2 ? b : b - g.points);
      const double m = std::norm(c[static_cast<std::size_t>(a) * g.points + b]);
      total += m;
      if (sa > quarter || sb > quarter) high += m;
    }
  }
  if (total > 0.0 && high / total > tail_tol)
    throw ResolutionError("evolution: " + core::fmt(high / total) +
                          " of the mass lies beyond half the Nyquist frequency; refine the grid");
}

double cartesian_residual_norm(const CartesianField& u, const core::PotentialModel& model, double energy) {
  require_original(u);
  const auto& g = u.grid();
  const auto v = grid_potential(g, model);
  std::vector<cplx> c = u.samples();
  const Fft fft({g.points, g.points});
  fft.forward(c.data());
  const double n2 = static_cast<double>(g.size());
  for (int a = 0; a < g.points; ++a)
    for (int b = 0; b < g.points; ++b) {
      const double k2 = std::pow(wavenumber(g, a), 2) + std::pow(wavenumber(g, b), 2);
      c[static_cast<std::size_t>(a) * g.points + b] *= k2 / n2;
    }
  fft.backward(c.data());
  double acc = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) acc += std::norm(c[k] + (v[k] - energy) * u.samples()[k]);
  return std::sqrt(acc) * g.spacing();
}

SplitStepPropagator::SplitStepPropagator(const CartesianGrid& grid, const core::PotentialModel& model, double dt,
                                         EvolutionOptions opts)
    : grid_(grid), dt_(dt), opts_(opts) {
  grid_.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("evolution: dt must be positive");
  const auto v = grid_potential(grid_, model);
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (!(dt * vmax < 0.5))
    throw std::invalid_argument("evolution: dt*sup|V| = " + core::fmt(dt * vmax) + " must stay below 0.5");
  const auto mask = edge_mask(grid_.points, opts_.absorb_fraction);
  half_potential_.resize(grid_.size());
  kinetic_.resize(grid_.size());
  const double n2 = static_cast<double>(grid_.size());
  for (int i = 0; i < grid_.points; ++i)
    for (int j = 0; j < grid_.points; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * grid_.points + j;
      // The mask is applied once per step, split evenly over the two half factors.
      half_potential_[k] = std::sqrt(mask[i] * mask[j]) * std::polar(1.0, -0.5 * dt * v[k]);
      const double k2 = std::pow(wavenumber(grid_, i), 2) + std::pow(wavenumber(grid_, j), 2);
      kinetic_[k] = std::polar(1.0 / n2, -dt * k2);
    }
}

void SplitStepPropagator::step(CartesianField& u) const {
  require_original(u);
  if (u.grid().points != grid_.points || u.grid().half_width != grid_.half_width)
    throw std::invalid_argument("evolution: field grid differs from the propagator grid");
  auto& s = u.samples();
  const Fft fft({grid_.points, grid_.points});
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= half_potential_[k];
  fft.forward(s.data());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= kinetic_[k];
  fft.backward(s.data());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= half_potential_[k];
  if (opts_.boundary_alarm > 0.0) {
    const double frame = opts_.absorb_fraction > 0.0 ? opts_.absorb_fraction : 0.05;
    const double edge = u.boundary_mass_fraction(frame);
    if (edge > opts_.boundary_alarm)
      throw SupportEscapeError("evolution: boundary frame holds " + core::fmt(edge) + " of the mass (alarm at " +
                               core::fmt(opts_.boundary_alarm) + "); enlarge the box or shorten T");
  }
}

CartesianField split_step_evolve(const CartesianField& u, const core::PotentialModel& model, double dt, int steps,
                                 const EvolutionOptions& opts,
                                 const std::function<void(int, const CartesianField&)>& hook) {
  if (steps < 0) throw std::invalid_argument("evolution: negative step count");
  const SplitStepPropagator prop(u.grid(), model, dt, opts);
  if (opts.check_momentum) check_momentum_resolution(u, opts.momentum_tail_tol);
  CartesianField w = u;
  if (hook) hook(0, w);
  for (int n = 1; n <= steps; ++n) {
    prop.step(w);
    if (hook) hook(n, w);
  }
  return w;
}

}  // namespace semilab::propagation
