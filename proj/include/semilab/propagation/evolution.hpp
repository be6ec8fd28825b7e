#pragma once

#include <functional>

#include "semilab/core/potential.hpp"
#include "semilab/quantization/cartesian_field.hpp"

namespace semilab::propagation {

using quantization::CartesianField;
using quantization::CartesianGrid;
using quantization::cplx;

struct EvolutionOptions {
  double absorb_fraction = 0.05;  ///< width of the absorbing frame per axis; 0 disables it
  double boundary_alarm = 1e-4;   ///< max mass fraction allowed inside the frame; ≤ 0 disables
  bool check_momentum = true;
  /// Largest mass fraction tolerated beyond half the Nyquist frequency.
  double momentum_tail_tol = 1e-5;
};

/// V∞(θ)·j(r) + Vs(r) on the grid: the angular part is cut smoothly to 0 for r ≤ 1/2.
std::vector<double> grid_potential(const CartesianGrid& grid, const core::PotentialModel& model);

/// Throws ResolutionError when more than `tail_tol` of the mass sits at |k| beyond half the
/// Nyquist frequency on either axis.
void check_momentum_resolution(const CartesianField& u, double tail_tol = 1e-5);

/// ‖(-Δ + V - E)u‖ with a spectral Laplacian and the grid potential.
double cartesian_residual_norm(const CartesianField& u, const core::PotentialModel& model, double energy);

/// Strang splitting e^{-i dt V/2} e^{i dt Δ} e^{-i dt V/2} on the periodic box. Fields must be
/// in the original frame (ħ = 1).
class SplitStepPropagator {
 public:
  /// Throws std::invalid_argument unless dt > 0 and dt·sup|V| < 0.5.
  SplitStepPropagator(const CartesianGrid& grid, const core::PotentialModel& model, double dt,
                      EvolutionOptions opts = {});

  /// One step in place; raises SupportEscapeError when the boundary alarm trips.
  void step(CartesianField& u) const;
  double dt() const { return dt_; }
  const CartesianGrid& grid() const { return grid_; }

 private:
  CartesianGrid grid_;
  double dt_;
  EvolutionOptions opts_;
  std::vector<cplx> half_potential_;  ///< e^{-i dt V/2}, with the absorbing mask folded in
  std::vector<cplx> kinetic_;         ///< e^{-i dt |k|²}/N² (normalization of the FFT pair)
};

/// Evolve `steps` steps of size dt; hook(n, u) runs after step n (and for n = 0 on the input).
CartesianField split_step_evolve(const CartesianField& u, const core::PotentialModel& model, double dt, int steps,
                                 const EvolutionOptions& opts = {},
                                 const std::function<void(int, const CartesianField&)>& hook = {});

}  // namespace semilab::propagation
