#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "semilab/quantization/fft.hpp"

namespace semilab::quantization {

/// Uniform N×N grid on [-L, L)²; index (i, j) ↔ (x₁, x₂) = (-L + i·d, -L + j·d).
struct CartesianGrid {
  double half_width = 1.0;
  int points = 64;

  double spacing() const { return 2.0 * half_width / points; }
  double coord(int i) const { return -half_width + i * spacing(); }
  std::size_t size() const { return static_cast<std::size_t>(points) * static_cast<std::size_t>(points); }
  /// Throws std::invalid_argument unless N is a power of two ≥ 4 and L > 0.
  void validate() const;
};

/// Original frame: the state lives at |x| ~ 1/h and is quantized as ã(hx, D_x).
/// Dilated frame: X = hx, quantized as ã(X, hD_X).
enum class Frame { Original, Dilated };

class CartesianField {
 public:
  CartesianField() = default;
  CartesianField(CartesianGrid grid, double h, Frame frame = Frame::Original);

  const CartesianGrid& grid() const { return grid_; }
  double h() const { return h_; }
  Frame frame() const { return frame_; }
  /// ħ of the quantization on this frame: h when dilated, 1 in the original frame.
  double hbar() const { return frame_ == Frame::Dilated ? h_ : 1.0; }

  cplx& at(int i, int j) { return samples_[index(i, j)]; }
  const cplx& at(int i, int j) const { return samples_[index(i, j)]; }
  std::vector<cplx>& samples() { return samples_; }
  const std::vector<cplx>& samples() const { return samples_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * grid_.points + j; }

  /// d² Σ|u|².
  double norm_squared() const;
  double norm() const;
  /// Rescale to unit norm; returns the norm before scaling. Throws on a zero field.
  double normalize();
  /// d² Σ conj(u) v.
  cplx inner(const CartesianField& other) const;
  /// Fraction of |u|² on points within `fraction` of the boundary (per axis).
  double boundary_mass_fraction(double fraction) const;

 private:
  CartesianGrid grid_;
  double h_ = 1.0;
  Frame frame_ = Frame::Original;
  std::vector<cplx> samples_;
};

/// exp(-|x - x0|²/(2σ²) + i ξ0·x/ħ), normalized on the grid.
CartesianField coherent_state(const CartesianGrid& grid, double h, Frame frame, double x0, double y0, double xi0,
                              double eta0, double sigma);

enum class DilationDirection { Forward, Inverse };

/// (U_h u)(X) = h^{-1} u(X/h). Forward maps the original frame to the dilated frame,
/// inverse maps back. On the grid this rescales coordinates and values exactly, so
/// the map is unitary to round-off.
CartesianField dilate(const CartesianField& u, DilationDirection direction);

/// Dilate and resample onto `target` by bicubic interpolation. Throws
/// SupportEscapeError when more than 1e-8 of the mass falls outside the target grid.
CartesianField dilate_onto(const CartesianField& u, DilationDirection direction, const CartesianGrid& target);

/// Keys kernel (a = -1/2), support |t| < 2.
double cubic_convolution_weight(double t);

/// Keys cubic convolution interpolation of the samples at continuous coords (x, y);
/// zero outside the grid.
cplx interpolate_bicubic(const CartesianField& u, double x, double y);

/// Cartesian matrix format: header "L,N,h" then one row per i with re,im pairs.
void write_cartesian_matrix(std::ostream& out, const CartesianField& u);

}  // namespace semilab::quantization
