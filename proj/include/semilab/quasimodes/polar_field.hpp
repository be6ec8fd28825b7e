#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace semilab::quasimodes {

using cplx = std::complex<double>;

/// Uniform radial grid r_i = r_min + i·dr (i < N_r, endpoints included) times a periodic
/// angular grid θ_j = 2πj/N_θ.
struct PolarGrid {
  double r_min = 1.0;
  double r_max = 2.0;
  int n_r = 64;
  int n_theta = 64;

  double dr() const { return (r_max - r_min) / (n_r - 1); }
  double dtheta() const;
  double r(int i) const { return r_min + i * dr(); }
  double theta(int j) const { return j * dtheta(); }
  /// Throws std::invalid_argument unless 0 ≤ r_min < r_max, N_r ≥ 16 and N_θ is a power of two ≥ 8.
  void validate() const;
};

/// ∫|u|² r dr dθ (n = 2 weight) by the rectangle rule on both axes.
class PolarField {
 public:
  PolarField() = default;
  PolarField(PolarGrid grid, double h);
  /// Samples radial[i]·angular[j].
  static PolarField outer_product(const PolarGrid& grid, double h, const std::vector<cplx>& radial,
                                  const std::vector<cplx>& angular);

  const PolarGrid& grid() const { return grid_; }
  double h() const { return h_; }
  cplx& at(int i, int j) { return samples_[static_cast<std::size_t>(i) * grid_.n_theta + j]; }
  const cplx& at(int i, int j) const { return samples_[static_cast<std::size_t>(i) * grid_.n_theta + j]; }
  std::vector<cplx>& samples() { return samples_; }
  const std::vector<cplx>& samples() const { return samples_; }

  double norm_squared() const;
  double norm() const;
  double normalize();
  cplx inner(const PolarField& other) const;

 private:
  PolarGrid grid_;
  double h_ = 1.0;
  std::vector<cplx> samples_;
};

/// Tensor-product field radial ⊗ angular, kept factored so that very fine angular grids
/// stay affordable.
struct SeparableField {
  PolarGrid grid;
  double h = 1.0;
  std::vector<cplx> radial;
  std::vector<cplx> angular;

  cplx value(int i, int j) const { return radial[i] * angular[j]; }
  double norm_squared() const;
  PolarField to_field() const { return PolarField::outer_product(grid, h, radial, angular); }
};

/// Header "r_min,r_max,N_r,N_theta,h" then N_r rows of re,im pairs.
void write_polar_matrix(std::ostream& out, const PolarField& u);

/// Radial weight of the n = 2 quadrature: Σ |f_i|² r_i dr.
double radial_norm_squared(const PolarGrid& grid, const std::vector<cplx>& radial);
/// Σ |g_j|² dθ.
double angular_norm_squared(const PolarGrid& grid, const std::vector<cplx>& angular);

}  // namespace semilab::quasimodes
