#pragma once

#include <optional>
#include <vector>

namespace semilab::core {

/// One harmonic of V∞: cos_coeff·cos(mθ) + sin_coeff·sin(mθ).
struct FourierMode {
  int m = 0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// Vs(r) = amplitude·(1 + r/radial_scale)^(-decay_exponent), decay_exponent > 1.
struct ShortRange {
  double amplitude = 0.0;
  double decay_exponent = 2.0;
  double radial_scale = 1.0;
};

/// V = V∞(θ) + Vs(r) with V∞ a real trigonometric polynomial on the circle,
/// together with the energy level E the experiment is run at.
class PotentialModel {
 public:
  PotentialModel() = default;
  /// Throws std::invalid_argument on negative modes, decay_exponent ≤ 1 or radial_scale ≤ 0.
  PotentialModel(std::vector<FourierMode> modes, std::optional<ShortRange> short_range = std::nullopt,
                 double energy = 0.0);

  /// cosθ + … helpers used throughout tests and shipped configs.
  static PotentialModel cosine(double energy = 0.0);
  /// (1 - cosθ)² = 3/2 - 2cosθ + ½cos2θ: degenerate minimum of order 3 at θ = 0.
  static PotentialModel degenerate_quartic(double energy = 0.0);
  static PotentialModel zero(double energy = 0.0);

  const std::vector<FourierMode>& modes() const noexcept { return modes_; }
  const std::optional<ShortRange>& short_range() const noexcept { return short_range_; }
  double energy() const noexcept { return energy_; }
  PotentialModel with_energy(double energy) const;

  double v_inf(double theta) const;
  /// order-th θ-derivative of V∞, exact from the coefficients (order ≥ 0).
  double v_inf_derivative(double theta, int order) const;
  double v_short(double r) const;
  /// Σ|c_m| + |s_m|: a bound for sup|V∞|.
  double v_inf_bound() const;
  /// Sampled extrema of V∞ (4096 samples, refined by golden-section search).
  double v_inf_min() const;
  double v_inf_max() const;
  /// True when every nonconstant harmonic vanishes.
  bool is_constant() const;

 private:
  std::vector<FourierMode> modes_;
  std::optional<ShortRange> short_range_;
  double energy_ = 0.0;
};

/// V∞(θ) + Vs(r,θ); independent of r without a short-range part.
double eval_potential(const PotentialModel& model, double r, double theta);

/// [∂θV∞, ..., ∂θ^max_order V∞] at theta. Throws std::invalid_argument if max_order > 8.
std::vector<double> potential_derivatives(const PotentialModel& model, double theta, int max_order);

struct CriticalPoint {
  double theta0 = 0.0;  ///< in [0, 2π)
  int order = 0;        ///< derivatives 1..order vanish
  double value = 0.0;   ///< V∞(theta0)
};

struct CriticalPointSet {
  bool degenerate = false;  ///< V∞ constant: every direction is critical
  std::vector<CriticalPoint> points;
};

struct CriticalPointOptions {
  int samples = 4096;
  double bisection_tol = 1e-12;
  double order_tol = 1e-8;
};

/// Roots of ∂θV∞ on [0, 2π), each annotated with its maximal vanishing order.
/// `tol` bounds |∂θV∞| at an accepted root. Throws std::invalid_argument for tol ≤ 0.
CriticalPointSet find_critical_points(const PotentialModel& model, double tol,
                                      const CriticalPointOptions& options = {});

/// Maximal k ≤ 8 with |∂θ^m V∞(θ)| ≤ order_tol for 1 ≤ m ≤ k.
int critical_order(const PotentialModel& model, double theta, double order_tol = 1e-8);

}  // namespace semilab::core
