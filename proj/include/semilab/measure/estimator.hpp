#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "semilab/core/cutoff.hpp"
#include "semilab/measure/dictionary.hpp"
#include "semilab/quantization/weyl.hpp"
#include "semilab/quasimodes/quasimode.hpp"

namespace semilab::measure {

using quantization::CartesianGrid;
using quantization::PairingTable;

struct SweepOptions {
  double max_spacing = 0.45;  ///< Cartesian spacing in the original frame
  double box_factor = 1.3;    ///< half-width of the box over the outer support radius
  int stride = 1;
  unsigned threads = 1;
  quasimodes::GridPolicy policy;
};

/// Smallest power-of-two grid with spacing ≤ max_spacing on [-L, L)², L = box_factor·r_max.
CartesianGrid sweep_grid(const quasimodes::QuasimodeSpec& spec, double h, const SweepOptions& opts = {});

/// ⟨u_h, Op_{f_h}(a) u_h⟩ for every dictionary symbol and h. Needs ≥ 4 geometric h values
/// and a j-step or J-log cutoff (std::invalid_argument otherwise). Numerical failures of
/// one h are recorded as invalid cells with the reason.
PairingTable pairing_sweep(const quasimodes::QuasimodeSpec& spec, const core::PotentialModel& model,
                           const SymbolDictionary& dict, const std::vector<double>& h_list,
                           const core::CutoffFamily& cutoff, const SweepOptions& opts = {});

/// Least-squares fit v(h) = limit + c·h^p over p ∈ [1/2, 2] (step 0.01).
struct Extrapolation {
  double limit = 0.0;
  double coefficient = 0.0;
  double exponent = 0.0;
  double residual = 0.0;   ///< RMS of the fit
  double error_bar = 0.0;  ///< |last value - limit| + residual
  double last_value = 0.0;
  int points = 0;
  /// Error bar within max(|limit|, tol) and at least 3 valid points.
  bool conclusive = false;
};

/// Needs h.size() == v.size(); fewer than 3 points gives an inconclusive result.
Extrapolation extrapolate(const std::vector<double>& h, const std::vector<double>& v, double tol);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct SymbolLimit {
  std::string name;
  SymbolTag tag = SymbolTag::OffSupport;
  Extrapolation fit;
};

struct LocalizationReport {
  double tol = 0.1;
  std::vector<SymbolLimit> limits;
  Verdict off_support = Verdict::Inconclusive;
  Verdict shell = Verdict::Inconclusive;
  Verdict mass = Verdict::Inconclusive;
  double mass_estimate = 0.0;   ///< limit of the narrowest approximate-identity probe
  double max_total_mass = 0.0;  ///< largest approximate-identity limit (finiteness check)
  bool all_pass() const;
};

/// Verdicts at tolerance tol: off-support |limit| ≤ tol, shell |limit| ≤ tol, narrowest
/// approximate-identity limit ≥ 1 - tol. A verdict fails as soon as one conclusive probe
/// violates it; otherwise any inconclusive probe makes it inconclusive.
LocalizationReport localization_report(const PairingTable& table, const SymbolDictionary& dict,
                                       const std::string& cutoff_id, double tol = 0.1);

/// JSON with tol, verdicts, and per-symbol limits and error bars.
void write_localization_json(std::ostream& out, const LocalizationReport& report);

struct TailMassRow {
  double h = 0.0;
  double c = 0.0;
  double residual_norm = 0.0;
  double j_norm = 0.0;        ///< ‖J_h(hr) u_h‖
  double j_tilde_norm = 0.0;  ///< ‖J̃_h(hr) u_h‖, J̃_h(ρ) = j(4 log ρ / log c(h)^{-1})
};

/// ‖J_h(hr)u‖ and ‖J̃_h(hr)u‖ for one field; c(h) ≥ 1 throws std::domain_error.
std::pair<double, double> tail_masses(const quasimodes::SeparableField& u, double c);

/// The tail-mass table over h_list with c(h) from c_of_h(δ). Residuals are measured unless a
/// residual table is supplied.
std::vector<TailMassRow> tail_mass_diagnostic(const quasimodes::QuasimodeSpec& spec,
                                              const core::PotentialModel& model, const std::vector<double>& h_list,
                                              double delta,
                                              const std::vector<core::ResidualSample>& residual_table = {},
                                              const quasimodes::GridPolicy& policy = {});

/// Columns h,c,residual_norm,J_norm,J_tilde_norm.
void write_tail_mass_csv(std::ostream& out, const std::vector<TailMassRow>& rows);

}  // namespace semilab::measure
