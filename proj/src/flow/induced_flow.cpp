#include "semilab/flow/induced_flow.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "semilab/core/format.hpp"
#include "semilab/core/smooth.hpp"

namespace semilab::flow {

using core::PotentialModel;

double Tangent::norm() const { return std::sqrt(rho * rho + theta * theta + eta * eta); }

Tangent flow_rhs(const PhasePoint& p, const PotentialModel& model) {
  const double dv = model.v_inf_derivative(p.theta, 1);
  return {2.0 * p.eta * p.eta, 2.0 * p.eta, -(dv + 2.0 * p.rho * p.eta)};
}

double flow_energy(const PhasePoint& p, const PotentialModel& model) {
  return p.rho * p.rho + p.eta * p.eta + model.v_inf(p.theta);
}

namespace {

PhasePoint to_point(const State<5>& y) { return {y[0], y[1], y[2]}; }

void append_sample(Trajectory& traj, double t, const State<5>& y, const PotentialModel& model) {
  const PhasePoint p = to_point(y);
  const double dv = model.v_inf_derivative(p.theta, 1);
  traj.times.push_back(t);
  traj.states.push_back(p);
  traj.energy.push_back(flow_energy(p, model));
  traj.lyapunov_F.push_back(-dv * p.eta);
  traj.lyapunov_G.push_back(dv * dv);
  traj.q_integral.push_back(y[3]);
  traj.g_integral.push_back(y[4]);
}

// Uniform samples over [0, t_end] in increasing time order. Past the last dense
// segment (early fixed-point exit) the final state is held.
void sample(Trajectory& traj, const DenseOutput<5>& dense, const State<5>& y_last, double t_end, std::size_t n,
            const PotentialModel& model) {
  const double lo = std::min(0.0, t_end), hi = std::max(0.0, t_end);
  const double covered_lo = std::min(dense.t_begin(), dense.t_end());
  const double covered_hi = std::max(dense.t_begin(), dense.t_end());
  for (std::size_t i = 0; i < n; ++i) {
    double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (i == n - 1) t = hi;
    const bool inside = t >= covered_lo - 1e-12 && t <= covered_hi + 1e-12;
    append_sample(traj, t, inside ? dense.eval(t) : y_last, model);
  }
}

}  // namespace

PhasePoint Trajectory::state_at(double t) const {
  if (!dense || dense->empty()) return p0;
  const double lo = std::min(dense->t_begin(), dense->t_end());
  const double hi = std::max(dense->t_begin(), dense->t_end());
  if (t < lo - 1e-12 || t > hi + 1e-12) {
    // Beyond an early fixed-point exit the state is frozen.
    const double far = backward ? lo : hi;
    if ((backward && t < lo) || (!backward && t > hi)) return to_point(dense->eval(far));
    throw std::out_of_range("Trajectory::state_at: time outside the integrated window");
  }
  return to_point(dense->eval(t));
}

Trajectory integrate_flow(const PhasePoint& p0, const PotentialModel& model, double t_end, double tol,
                          const FlowOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_flow: tol must be positive");
  if (t_end == 0.0 || !std::isfinite(t_end)) throw std::invalid_argument("integrate_flow: t_end must be nonzero");
  if (options.output_samples < 2) throw std::invalid_argument("integrate_flow: need at least two output samples");

  Trajectory traj;
  traj.backward = t_end < 0.0;
  traj.p0 = p0;
  const State<5> y0{p0.rho, p0.theta, p0.eta, 0.0, 0.0};

  if (flow_rhs(p0, model).norm() < options.fixed_point_threshold) {
    traj.fixed_point = true;
    const double lo = std::min(0.0, t_end), hi = std::max(0.0, t_end);
    for (std::size_t i = 0; i < options.output_samples; ++i) {
      const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(options.output_samples - 1);
      append_sample(traj, t, y0, model);
    }
    return traj;
  }

  auto rhs = [&model](double, const State<5>& y) {
    const double dv = model.v_inf_derivative(y[1], 1);
    return State<5>{2.0 * y[2] * y[2], 2.0 * y[2], -(dv + 2.0 * y[0] * y[2]), y[2] * y[2], dv * dv};
  };
  auto dense = std::make_shared<DenseOutput<5>>();
  State<5> y_last = y0;
  StepControl ctl;
  ctl.atol = tol;
  ctl.rtol = tol;
  ctl.max_step = options.max_step;
  const auto summary = dopri5<5>(rhs, 0.0, y0, t_end, ctl, [&](const DenseSegment<5>& seg, const State<5>& k) {
    dense->push(seg);
    y_last = seg.eval(seg.t0 + seg.step);
    const double speed = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    return speed >= options.fixed_point_threshold;
  });
  traj.accepted_steps = summary.accepted;
  traj.rejected_steps = summary.rejected;
  traj.dense = dense;
  if (summary.outcome == StepOutcome::StepUnderflow || summary.outcome == StepOutcome::TooManySteps) {
    if (!dense->empty()) {
      const std::size_t n = std::max<std::size_t>(2, options.output_samples / 4);
      sample(traj, *dense, y_last, summary.t_reached, n, model);
    }
    throw IntegrationError(summary.outcome == StepOutcome::StepUnderflow
                               ? "integrate_flow: step size underflow at t = " + core::fmt(summary.t_reached)
                               : "integrate_flow: step budget exhausted at t = " + core::fmt(summary.t_reached),
                           std::move(traj));
  }
  sample(traj, *dense, y_last, t_end, options.output_samples, model);
  return traj;
}

double check_energy_conservation(const Trajectory& traj) {
  if (traj.energy.empty()) throw std::invalid_argument("check_energy_conservation: empty trajectory");
  const double e0 = traj.backward ? traj.energy.back() : traj.energy.front();
  double drift = 0.0;
  for (double e : traj.energy) drift = std::max(drift, std::abs(e - e0));
  return drift;
}

AsymptoticReport asymptotic_diagnostics(const Trajectory& traj, const PotentialModel& model,
                                        const AsymptoticOptions& options) {
  const std::size_t n = traj.size();
  if (n == 0) throw std::invalid_argument("asymptotic_diagnostics: empty trajectory");
  AsymptoticReport rep;
  for (std::size_t i = 1; i < n; ++i)
    if (traj.states[i].rho < traj.states[i - 1].rho - options.monotone_tol) rep.rho_monotone = false;

  const double t_lo = traj.times.front(), t_hi = traj.times.back();
  const double span = t_hi - t_lo;
  // Tail window sits at the far end of the integration direction.
  std::size_t first = 0, last = n - 1;
  if (!traj.backward) {
    const double start = t_hi - options.tail_fraction * span;
    while (first < n && traj.times[first] < start - 1e-12 * std::max(1.0, std::abs(start))) ++first;
  } else {
    const double stop = t_lo + options.tail_fraction * span;
    while (last > 0 && traj.times[last] > stop + 1e-12 * std::max(1.0, std::abs(stop))) --last;
  }
  rep.tail_samples = last - first + 1;
  if (!traj.fixed_point && rep.tail_samples < 100)
    throw std::invalid_argument("asymptotic_diagnostics: tail window holds fewer than 100 samples");

  const std::size_t far = traj.backward ? 0 : n - 1;
  rep.rho_limit = traj.states[far].rho;
  rep.theta_limit = core::wrap_angle(traj.states[far].theta);
  rep.energy = traj.backward ? traj.energy.back() : traj.energy.front();
  for (std::size_t i = first; i <= last; ++i) {
    rep.tail_max_eta = std::max(rep.tail_max_eta, std::abs(traj.states[i].eta));
    rep.tail_max_dV = std::max(rep.tail_max_dV, std::abs(model.v_inf_derivative(traj.states[i].theta, 1)));
  }
  rep.q_tail_increase = std::abs(traj.q_integral[last] - traj.q_integral[first]);
  rep.g_tail_increase = std::abs(traj.g_integral[last] - traj.g_integral[first]);
  rep.integrals_bounded =
      rep.q_tail_increase < options.bounded_increase && rep.g_tail_increase < options.bounded_increase;
  return rep;
}

double FullTrajectory::tau_max() const { return tau.empty() ? 0.0 : tau.back(); }

PhasePoint FullTrajectory::pullback_at_tau(double tau_value) const {
  if (!dense || dense->empty()) throw std::logic_error("pullback_at_tau: trajectory has no dense output");
  const auto& segs = dense->segments();
  const double tau_end = segs.back().eval(segs.back().t0 + segs.back().step)[4];
  if (tau_value < 0.0 || tau_value > tau_end + 1e-12)
    throw std::out_of_range("pullback_at_tau: tau outside the integrated range");
  // τ is increasing in t; locate the step whose end reaches the target.
  std::size_t lo = 0, hi = segs.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto& s = segs[mid];
    if (s.c[0][4] + s.c[1][4] < tau_value) lo = mid + 1;
    else hi = mid;
  }
  const auto& seg = segs[lo];
  double a = 0.0, b = 1.0;
  for (int it = 0; it < 80 && b - a > 1e-16; ++it) {
    const double m = 0.5 * (a + b);
    if (seg.eval(seg.t0 + m * seg.step)[4] < tau_value) a = m;
    else b = m;
  }
  const State<5> y = seg.eval(seg.t0 + 0.5 * (a + b) * seg.step);
  return {y[1], y[2], y[3] / y[0]};
}

FullTrajectory lift_full_flow(double r0, const PhasePoint& p0, const PotentialModel& model, double t_end,
                              const LiftOptions& options) {
  if (!(r0 > 0.0)) throw std::invalid_argument("lift_full_flow: r0 must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("lift_full_flow: t_end must be positive");
  auto rhs = [&model](double, const State<5>& y) {
    const double r = y[0];
    return State<5>{2.0 * y[1], 2.0 * y[3] * y[3] / (r * r * r), 2.0 * y[3] / (r * r),
                    -model.v_inf_derivative(y[2], 1), 1.0 / r};
  };
  const State<5> y0{r0, p0.rho, p0.theta, r0 * p0.eta, 0.0};
  auto dense = std::make_shared<DenseOutput<5>>();
  bool collapsed = false;
  StepControl ctl;
  ctl.atol = options.tol;
  ctl.rtol = options.tol;
  const auto summary = dopri5<5>(rhs, 0.0, y0, t_end, ctl, [&](const DenseSegment<5>& seg, const State<5>&) {
    const State<5> end = seg.eval(seg.t0 + seg.step);
    if (!(end[0] > 0.0)) {
      collapsed = true;
      return false;
    }
    dense->push(seg);
    return !(options.stop_at_tau && end[4] >= *options.stop_at_tau);
  });
  if (collapsed || summary.outcome == StepOutcome::StepUnderflow || summary.outcome == StepOutcome::TooManySteps)
    throw NumericalError("lift_full_flow: radius reached 0 near t = " + core::fmt(summary.t_reached) +
                         " (polar coordinates break down)");

  FullTrajectory out;
  out.dense = dense;
  const double t_stop = dense->t_end();
  const std::size_t n = std::max<std::size_t>(2, options.output_samples);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i == n - 1 ? t_stop : t_stop * static_cast<double>(i) / static_cast<double>(n - 1);
    const State<5> y = dense->eval(t);
    out.times.push_back(t);
    out.radius.push_back(y[0]);
    out.states.push_back({y[1], y[2], y[3]});
    out.tau.push_back(y[4]);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,rho,theta,eta,E,F,G,q_integral\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& p = traj.states[i];
    out << core::fmt(traj.times[i]) << ',' << core::fmt(p.rho) << ',' << core::fmt(p.theta) << ','
        << core::fmt(p.eta) << ',' << core::fmt(traj.energy[i]) << ',' << core::fmt(traj.lyapunov_F[i]) << ','
        << core::fmt(traj.lyapunov_G[i]) << ',' << core::fmt(traj.q_integral[i]) << '\n';
  }
}

}  // namespace semilab::flow
