#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semilab/core/errors.hpp"
#include "semilab/core/potential.hpp"
#include "semilab/flow/dopri5.hpp"

namespace semilab::flow {

/// State (ρ, θ, η) of the induced system. θ is kept unwrapped.
struct PhasePoint {
  double rho = 0.0;
  double theta = 0.0;
  double eta = 0.0;
};

struct Tangent {
  double rho = 0.0;
  double theta = 0.0;
  double eta = 0.0;
  double norm() const;
};

/// (dρ, dθ, dη)/dτ = (2η², 2η, -(∂θV∞ + 2ρη)) for p = ρ² + η² + V∞(θ).
Tangent flow_rhs(const PhasePoint& p, const core::PotentialModel& model);

/// ρ² + η² + V∞(θ).
double flow_energy(const PhasePoint& p, const core::PotentialModel& model);

struct FlowOptions {
  double tol = 1e-10;  ///< absolute and relative local error tolerance
  std::size_t output_samples = 2001;
  double fixed_point_threshold = 1e-12;
  double max_step = 1.0;
};

/// Uniformly sampled induced-flow solution with diagnostic series. Times are
/// increasing; a backward run (t_end < 0) is stored over [t_end, 0].
struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<double> energy;
  std::vector<double> lyapunov_F;   ///< -∂θV(θ)·η
  std::vector<double> lyapunov_G;   ///< (∂θV(θ))²
  std::vector<double> q_integral;   ///< ∫₀ᵗ η² ds
  std::vector<double> g_integral;   ///< ∫₀ᵗ (∂θV)² ds
  bool backward = false;
  bool fixed_point = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Dense solution in integration order; components ρ, θ, η, ∫η², ∫(∂θV)². Empty for fixed points.
  std::shared_ptr<const DenseOutput<5>> dense;
  PhasePoint p0;

  std::size_t size() const { return times.size(); }
  /// State at any t within the integrated window (exact for fixed points).
  PhasePoint state_at(double t) const;
};

/// Raised when the integrator breaks down; carries what was computed so far.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, Trajectory partial)
      : NumericalError(what), partial_(std::make_shared<Trajectory>(std::move(partial))) {}
  const Trajectory& partial() const { return *partial_; }

 private:
  std::shared_ptr<Trajectory> partial_;
};

/// Adaptive DOPRI5 integration of the induced flow. Throws std::invalid_argument for
/// tol ≤ 0 or t_end = 0, IntegrationError on step-size underflow.
Trajectory integrate_flow(const PhasePoint& p0, const core::PotentialModel& model, double t_end, double tol,
                          const FlowOptions& options = {});

/// max_t |E(t) - E(0)|.
double check_energy_conservation(const Trajectory& traj);

struct AsymptoticReport {
  bool rho_monotone = true;   ///< ρ nondecreasing in t within monotone_tol
  double rho_limit = 0.0;     ///< ρ at the far end of the run
  double theta_limit = 0.0;   ///< θ at the far end, reduced to [0, 2π)
  double energy = 0.0;
  double tail_max_eta = 0.0;
  double tail_max_dV = 0.0;
  double q_tail_increase = 0.0;  ///< growth of ∫η² over the tail window
  double g_tail_increase = 0.0;  ///< growth of ∫(∂θV)² over the tail window
  bool integrals_bounded = true;
  std::size_t tail_samples = 0;
};

struct AsymptoticOptions {
  double monotone_tol = 1e-9;
  double tail_fraction = 0.2;
  double bounded_increase = 1e-4;
};

/// Tail window = last tail_fraction of the run in integration order. Throws
/// std::invalid_argument when the tail holds fewer than 100 samples (unless fixed point).
AsymptoticReport asymptotic_diagnostics(const Trajectory& traj, const core::PotentialModel& model,
                                        const AsymptoticOptions& options = {});

/// Full Hamiltonian flow in polar variables, sampled uniformly in t.
struct FullTrajectory {
  std::vector<double> times;
  std::vector<double> radius;
  std::vector<PhasePoint> states;  ///< (ρ̃, θ̃, η̃)
  std::vector<double> tau;
  std::shared_ptr<const DenseOutput<5>> dense;  ///< r̃, ρ̃, θ̃, η̃, τ

  /// Pulled-back induced state (ρ̃, θ̃, η̃/r̃) at reparametrized time τ.
  PhasePoint pullback_at_tau(double tau_value) const;
  double tau_max() const;
};

struct LiftOptions {
  double tol = 1e-10;
  std::size_t output_samples = 2001;
  /// Stop as soon as τ reaches this value (t_end still caps the run).
  std::optional<double> stop_at_tau;
};

/// Integrates r̃' = 2ρ̃, ρ̃' = 2η̃²/r̃³, θ̃' = 2η̃/r̃², η̃' = -∂θV∞(θ̃), τ' = 1/r̃ from
/// (r0, p0.rho, p0.theta, r0·p0.eta), so the pullback starts at p0. Throws
/// NumericalError if r̃ reaches 0, std::invalid_argument if r0 ≤ 0.
FullTrajectory lift_full_flow(double r0, const PhasePoint& p0, const core::PotentialModel& model, double t_end,
                              const LiftOptions& options = {});

/// CSV with header t,rho,theta,eta,E,F,G,q_integral.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace semilab::flow
