#pragma once

#include <iosfwd>
#include <vector>

#include "semilab/propagation/evolution.hpp"
#include "semilab/quasimodes/quasimode.hpp"

namespace semilab::propagation {

enum class OmegaKind {
  CollarComplement,  ///< {r > R} minus {dist(θ, θ0) < C r^{-exponent}}, optionally with the ball r ≤ R
  Whole,
  HalfPlane,  ///< {x·n > offset}, n = (cos normal_angle, sin normal_angle)
};

struct ObservabilityConfig {
  OmegaKind omega = OmegaKind::CollarComplement;
  double theta0 = 0.0;
  double C = 1.5;
  double exponent = 0.5;
  double R = 1.0;
  bool include_inner_ball = false;
  double normal_angle = 0.0;
  double offset = 0.0;
  double T = 1.0;
  double dt = 0.005;

  /// T > 0, dt > 0 and T/dt an integer (to 1e-9); throws std::invalid_argument.
  void validate() const;
  int steps() const;
  bool contains(double x, double y) const;
};

/// d² Σ |u|² over grid points inside Ω (sharp indicator, no mollification).
double region_mass(const CartesianField& u, const ObservabilityConfig& cfg);

struct EvolutionReport {
  double h = 0.0;
  std::vector<double> times;
  std::vector<double> region_mass;  ///< F_m(t)
  std::vector<double> cumulative;   ///< trapezoid ∫₀^t F_m
  std::vector<double> norm;
  double norm_drift = 0.0;  ///< max |‖u(t)‖ - ‖u(0)‖|
  double residual_norm = 0.0;
  double transport_deficit = 0.0;
  double integral() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// F_m, cumulative integral and norm sampled every step of the evolution from `u`.
EvolutionReport evolve_and_observe(const CartesianField& u, const core::PotentialModel& model,
                                   const ObservabilityConfig& cfg, const EvolutionOptions& opts = {});

/// Columns t,F_m,cumulative,norm.
void write_evolution_csv(std::ostream& out, const EvolutionReport& report);

struct ObservabilityResult {
  std::vector<EvolutionReport> reports;  ///< one per h, in the input order
  std::vector<double> integrals;
  bool nonincreasing = false;  ///< within 1e-9
  bool final_small = false;    ///< last integral ≤ 0.1·T
};

/// Build each quasimode, transport it to `grid`, evolve to T and integrate F_m. Needs a
/// strictly decreasing h_list. Runs of different h go to separate threads.
ObservabilityResult observability_experiment(const quasimodes::QuasimodeSpec& spec, const core::PotentialModel& model,
                                             const std::vector<double>& h_list, const ObservabilityConfig& cfg,
                                             const CartesianGrid& grid, unsigned threads = 1);

struct FmBound {
  std::vector<double> constants;  ///< per run: max_t (F(t) - F(0))⁺ / (‖R‖ T)
  double fitted_C = 0.0;          ///< smallest C valid for every run
  double spread = 1.0;            ///< max/min ratio of the nonzero per-run constants
  bool pass = false;              ///< fitted_C ≤ 10
};

/// Checks max_t F(t) ≤ F(0) + C‖(P - E)u‖ T using the residual stored in each report.
/// A zero residual requires F(t) ≤ F(0) + 1e-6, failing with C = ∞ otherwise.
FmBound fm_bound_check(const std::vector<EvolutionReport>& reports, double T);

}  // namespace semilab::propagation
