#include "semilab/quantization/cartesian_field.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "semilab/core/errors.hpp"
#include "semilab/core/format.hpp"

namespace semilab::quantization {

void CartesianGrid::validate() const {
  if (!(half_width > 0.0)) throw std::invalid_argument("CartesianGrid: half-width must be positive");
  if (points < 4 || (points & (points - 1)) != 0)
    throw std::invalid_argument("CartesianGrid: points per axis must be a power of two >= 4");
}

CartesianField::CartesianField(CartesianGrid grid, double h, Frame frame) : grid_(grid), h_(h), frame_(frame) {
  grid_.validate();
  if (!(h > 0.0)) throw std::invalid_argument("CartesianField: h must be positive");
  samples_.assign(grid_.size(), cplx(0.0, 0.0));
}

double CartesianField::norm_squared() const {
  double s = 0.0;
  for (const auto& z : samples_) s += std::norm(z);
  const double d = grid_.spacing();
  return s * d * d;
}

double CartesianField::norm() const { return std::sqrt(norm_squared()); }

double CartesianField::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw std::invalid_argument("CartesianField::normalize: zero field");
  for (auto& z : samples_) z /= n;
  return n;
}

cplx CartesianField::inner(const CartesianField& other) const {
  if (other.samples_.size() != samples_.size()) throw std::invalid_argument("CartesianField::inner: grid mismatch");
  cplx s(0.0, 0.0);
  for (std::size_t k = 0; k < samples_.size(); ++k) s += std::conj(samples_[k]) * other.samples_[k];
  const double d = grid_.spacing();
  return s * (d * d);
}

double CartesianField::boundary_mass_fraction(double fraction) const {
  const int n = grid_.points;
  const int band = std::max(1, static_cast<int>(std::ceil(fraction * n)));
  double edge = 0.0, total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double m = std::norm(at(i, j));
      total += m;
      if (i < band || j < band || i >= n - band || j >= n - band) edge += m;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

CartesianField coherent_state(const CartesianGrid& grid, double h, Frame frame, double x0, double y0, double xi0,
                              double eta0, double sigma) {
  CartesianField u(grid, h, frame);
  const double hbar = u.hbar();
  for (int i = 0; i < grid.points; ++i) {
    for (int j = 0; j < grid.points; ++j) {
      const double x = grid.coord(i) - x0, y = grid.coord(j) - y0;
      const double amp = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
      const double phase = (xi0 * grid.coord(i) + eta0 * grid.coord(j)) / hbar;
      u.at(i, j) = amp * cplx(std::cos(phase), std::sin(phase));
    }
  }
  u.normalize();
  return u;
}

CartesianField dilate(const CartesianField& u, DilationDirection direction) {
  const bool forward = direction == DilationDirection::Forward;
  if (forward != (u.frame() == Frame::Original))
    throw std::invalid_argument(forward ? "dilate: forward dilation expects an original-frame field"
                                        : "dilate: inverse dilation expects a dilated-frame field");
  const double h = u.h();
  const double scale = forward ? h : 1.0 / h;  // coordinate factor
  CartesianGrid g = u.grid();
  g.half_width *= scale;
  CartesianField out(g, h, forward ? Frame::Dilated : Frame::Original);
  const double value_factor = 1.0 / scale;
  for (std::size_t k = 0; k < u.samples().size(); ++k) out.samples()[k] = u.samples()[k] * value_factor;
  return out;
}

double cubic_convolution_weight(double t) {
  t = std::abs(t);
  constexpr double a = -0.5;
  if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

cplx interpolate_bicubic(const CartesianField& u, double x, double y) {
  const auto& g = u.grid();
  const double d = g.spacing();
  const double fx = (x + g.half_width) / d, fy = (y + g.half_width) / d;
  const int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
  if (ix < -2 || iy < -2 || ix > g.points + 1 || iy > g.points + 1) return {0.0, 0.0};
  cplx acc(0.0, 0.0);
  for (int a = -1; a <= 2; ++a) {
    const int i = ix + a;
    if (i < 0 || i >= g.points) continue;
    const double wx = cubic_convolution_weight(fx - i);
    for (int b = -1; b <= 2; ++b) {
      const int j = iy + b;
      if (j < 0 || j >= g.points) continue;
      acc += wx * cubic_convolution_weight(fy - j) * u.at(i, j);
    }
  }
  return acc;
}

CartesianField dilate_onto(const CartesianField& u, DilationDirection direction, const CartesianGrid& target) {
  const CartesianField exact = dilate(u, direction);
  // Mass of the exact dilation outside the target window.
  const double total = exact.norm_squared();
  double outside = 0.0;
  const auto& eg = exact.grid();
  const double de = eg.spacing();
  for (int i = 0; i < eg.points; ++i)
    for (int j = 0; j < eg.points; ++j) {
      const double x = eg.coord(i), y = eg.coord(j);
      if (x < -target.half_width || x >= target.half_width || y < -target.half_width || y >= target.half_width)
        outside += std::norm(exact.at(i, j)) * de * de;
    }
  if (total > 0.0 && outside > 1e-8 * total)
    throw SupportEscapeError("dilate_onto: " + core::fmt(outside / total) + " of the mass leaves the target grid");
  CartesianField out(target, u.h(), exact.frame());
  for (int i = 0; i < target.points; ++i)
    for (int j = 0; j < target.points; ++j) out.at(i, j) = interpolate_bicubic(exact, target.coord(i), target.coord(j));
  return out;
}

void write_cartesian_matrix(std::ostream& out, const CartesianField& u) {
  out << "L,N,h\n"
      << core::fmt(u.grid().half_width) << ',' << u.grid().points << ',' << core::fmt(u.h()) << '\n';
  const int n = u.grid().points;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx z = u.at(i, j);
      out << (j ? "," : "") << core::fmt(z.real()) << ',' << core::fmt(z.imag());
    }
    out << '\n';
  }
}

}  // namespace semilab::quantization
