#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "semilab/core/potential.hpp"
#include "semilab/quasimodes/polar_field.hpp"

namespace semilab::quasimodes {

/// ℓ(0) = 2/3, ℓ(k) = k + 1 for k ≥ 1. Throws std::invalid_argument for k < 0.
double ell(int k);

/// Build parameters of a concentrating quasimode u_h = f_h(r) g_h(θ).
struct QuasimodeSpec {
  int case_id = 1;  ///< 1: E a critical value of V∞; 2: E above max V∞ with oscillating radial phase
  int k = 1;        ///< critical order at theta0
  double epsilon_exp = 0.1;
  double theta0 = 0.0;
  double support_constant = 1.0;
  /// Radial bump f = classic bump on (radial_lo, radial_hi), radial_lo ≥ 1.
  double radial_lo = 1.0;
  double radial_hi = 2.0;
  double energy = 0.0;  ///< E = E1 + E2
  double e1 = 0.0;      ///< 0 in case 1; E - V∞(theta0) > 0 in case 2
  double e2 = 0.0;      ///< V∞(theta0)

  /// Checks the case invariants against the potential; throws std::invalid_argument.
  void validate(const core::PotentialModel& model, double tol = 1e-8) const;
};

/// Case-1 (or case-2) spec at a critical point: fills E, E1, E2 from the potential.
QuasimodeSpec make_case1_spec(const core::PotentialModel& model, double theta0, int k, double epsilon_exp = 0.1);
QuasimodeSpec make_case2_spec(const core::PotentialModel& model, double theta0, int k, double energy,
                              double epsilon_exp = 0.1);

/// Radial compression s with f_h(r) ∝ f(s·r): h for case 1 with k > 0, h^{3/2} otherwise.
double radial_scale(const QuasimodeSpec& spec, double h);
/// h^{(1 + kε)/(k + 1)}.
double angular_half_width(const QuasimodeSpec& spec, double h);

/// φ(x) = 1 - S(2|x| - 1): 1 on |x| ≤ 1/2, 0 for |x| ≥ 1.
double angular_bump(double x);

/// f_h on the radial grid with unit L²(r dr) norm; case 2 carries e^{i√E1 r}.
/// Throws ResolutionError with fewer than 32 points across the bump or fewer than 8 per wavelength.
std::vector<cplx> radial_profile(const QuasimodeSpec& spec, double h, const PolarGrid& grid);

/// g_h(θ) = C φ(dist(θ, θ0)/width) with unit L²(S¹) norm. Throws ResolutionError (message
/// carries the required N_θ) with fewer than 16 points across the half-width.
std::vector<cplx> angular_profile(const QuasimodeSpec& spec, double h, const PolarGrid& grid);

struct GridPolicy {
  int radial_points_per_bump = 1024;
  int points_per_wavelength = 32;
  int angular_points_per_half_width = 128;
  int max_angular_points = 1 << 17;
};

/// Grid covering the radial support with the outer 5% empty and an angular grid that
/// keeps the profile spectrum below 1e-10 at Nyquist.
PolarGrid quasimode_grid(const QuasimodeSpec& spec, double h, const GridPolicy& policy = {});

SeparableField build_quasimode_factors(const QuasimodeSpec& spec, double h, const PolarGrid& grid);
/// Dense u_h = radial ⊗ angular, normalized to 1.
PolarField build_quasimode(const QuasimodeSpec& spec, double h, const PolarGrid& grid);

/// Relative magnitude of the top 5% of angular modes: max row spectrum there over the global max.
double angular_spectral_tail(const PolarField& u);
double angular_spectral_tail(const PolarGrid& grid, const std::vector<cplx>& angular);

/// (-∂r² - r^{-1}∂r - r^{-2}∂θ² + V(r,θ) - E)u with spectral ∂θ², 8th-order centred
/// differences in r (zero extension past the grid). Throws AliasingError when the angular
/// spectral tail exceeds 1e-10.
PolarField apply_P_minus_E(const PolarField& u, const core::PotentialModel& model, double energy);

/// ‖(P - E)u‖ for a factored field, evaluated row by row with the same operators.
double residual_norm(const SeparableField& u, const core::PotentialModel& model, double energy);

struct ResidualRow {
  double h = 0.0;
  double residual_norm = 0.0;
  double slope_so_far = 0.0;  ///< least-squares slope over rows up to this one (0 for the first)
  double oracle_residual = 0.0;  ///< same residual on the 2x refined grid
  int n_r = 0;
  int n_theta = 0;
};

struct ResidualScaling {
  std::vector<ResidualRow> rows;
  double slope = 0.0;
  double max_oracle_discrepancy = 0.0;  ///< max relative |residual - oracle|
};

/// Needs ≥ 4 geometrically spaced h (ratio constant to 1e-6); throws std::invalid_argument.
ResidualScaling residual_scaling(const QuasimodeSpec& spec, const core::PotentialModel& model,
                                 const std::vector<double>& h_list, const GridPolicy& policy = {},
                                 unsigned threads = 1);
/// CSV h,residual_norm,slope_so_far.
void write_residual_csv(std::ostream& out, const ResidualScaling& table);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SupportReport {
  bool contained = false;
  double mass_outside = 0.0;
};

/// Mass outside {r > 1, dist(θ, θ0) < C r^{-exponent}}; contained iff below 1e-10.
SupportReport support_report(const PolarField& u, double theta0, double C, double exponent);
SupportReport support_report(const SeparableField& u, double theta0, double C, double exponent);

}  // namespace semilab::quasimodes
