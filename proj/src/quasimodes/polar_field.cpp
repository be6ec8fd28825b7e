#include "semilab/quasimodes/polar_field.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "semilab/core/format.hpp"

namespace semilab::quasimodes {

double PolarGrid::dtheta() const { return 2.0 * std::numbers::pi / n_theta; }

void PolarGrid::validate() const {
  if (!(r_min >= 0.0 && r_max > r_min)) throw std::invalid_argument("PolarGrid: need 0 <= r_min < r_max");
  if (n_r < 16) throw std::invalid_argument("PolarGrid: need at least 16 radial points");
  if (n_theta < 8 || (n_theta & (n_theta - 1)) != 0)
    throw std::invalid_argument("PolarGrid: angular points must be a power of two >= 8");
}

PolarField::PolarField(PolarGrid grid, double h) : grid_(grid), h_(h) {
  grid_.validate();
  if (!(h > 0.0)) throw std::invalid_argument("PolarField: h must be positive");
  samples_.assign(static_cast<std::size_t>(grid_.n_r) * grid_.n_theta, cplx(0.0, 0.0));
}

PolarField PolarField::outer_product(const PolarGrid& grid, double h, const std::vector<cplx>& radial,
                                     const std::vector<cplx>& angular) {
  if (static_cast<int>(radial.size()) != grid.n_r || static_cast<int>(angular.size()) != grid.n_theta)
    throw std::invalid_argument("PolarField::outer_product: profile lengths do not match the grid");
  PolarField u(grid, h);
  for (int i = 0; i < grid.n_r; ++i)
    for (int j = 0; j < grid.n_theta; ++j) u.at(i, j) = radial[i] * angular[j];
  return u;
}

double PolarField::norm_squared() const {
  double s = 0.0;
  for (int i = 0; i < grid_.n_r; ++i) {
    double row = 0.0;
    for (int j = 0; j < grid_.n_theta; ++j) row += std::norm(at(i, j));
    s += row * grid_.r(i);
  }
  return s * grid_.dr() * grid_.dtheta();
}

double PolarField::norm() const { return std::sqrt(norm_squared()); }

double PolarField::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw std::invalid_argument("PolarField::normalize: zero field");
  for (auto& z : samples_) z /= n;
  return n;
}

cplx PolarField::inner(const PolarField& other) const {
  if (other.samples_.size() != samples_.size()) throw std::invalid_argument("PolarField::inner: grid mismatch");
  cplx s(0.0, 0.0);
  for (int i = 0; i < grid_.n_r; ++i) {
    cplx row(0.0, 0.0);
    for (int j = 0; j < grid_.n_theta; ++j) row += std::conj(at(i, j)) * other.at(i, j);
    s += row * grid_.r(i);
  }
  return s * (grid_.dr() * grid_.dtheta());
}

double radial_norm_squared(const PolarGrid& grid, const std::vector<cplx>& radial) {
  double s = 0.0;
  for (int i = 0; i < grid.n_r; ++i) s += std::norm(radial[i]) * grid.r(i);
  return s * grid.dr();
}

double angular_norm_squared(const PolarGrid& grid, const std::vector<cplx>& angular) {
  double s = 0.0;
  for (const auto& z : angular) s += std::norm(z);
  return s * grid.dtheta();
}

double SeparableField::norm_squared() const { return radial_norm_squared(grid, radial) * angular_norm_squared(grid, angular); }

void write_polar_matrix(std::ostream& out, const PolarField& u) {
  const auto& g = u.grid();
  out << "r_min,r_max,N_r,N_theta,h\n"
      << core::fmt(g.r_min) << ',' << core::fmt(g.r_max) << ',' << g.n_r << ',' << g.n_theta << ','
      << core::fmt(u.h()) << '\n';
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_theta; ++j) {
      const cplx z = u.at(i, j);
      out << (j ? "," : "") << core::fmt(z.real()) << ',' << core::fmt(z.imag());
    }
    out << '\n';
  }
}

}  // namespace semilab::quasimodes
