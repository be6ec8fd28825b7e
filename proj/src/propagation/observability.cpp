#include "semilab/propagation/observability.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "semilab/core/format.hpp"
#include "semilab/core/parallel.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/propagation/transport.hpp"

namespace semilab::propagation {

void ObservabilityConfig::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("observability: T must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("observability: dt must be positive");
  const double n = T / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
    throw std::invalid_argument("observability: T/dt must be an integer, got " + core::fmt(n));
  if (omega == OmegaKind::CollarComplement && !(C > 0.0))
    throw std::invalid_argument("observability: collar constant C must be positive");
}

int ObservabilityConfig::steps() const { return static_cast<int>(std::lround(T / dt)); }

bool ObservabilityConfig::contains(double x, double y) const {
  switch (omega) {
    case OmegaKind::Whole:
      return true;
    case OmegaKind::HalfPlane:
      return x * std::cos(normal_angle) + y * std::sin(normal_angle) > offset;
    case OmegaKind::CollarComplement: {
      const double r = std::hypot(x, y);
      if (r <= R) return include_inner_ball;
      return !(core::circle_distance(std::atan2(y, x), theta0) < C * std::pow(r, -exponent));
    }
  }
  return false;
}

double region_mass(const CartesianField& u, const ObservabilityConfig& cfg) {
  const auto& g = u.grid();
  double acc = 0.0;
  for (int i = 0; i < g.points; ++i)
    for (int j = 0; j < g.points; ++j)
      if (cfg.contains(g.coord(i), g.coord(j))) acc += std::norm(u.at(i, j));
  return acc * g.spacing() * g.spacing();
}

namespace {

// Points of the grid inside Ω, listed once so every step only sums them.
std::vector<std::size_t> omega_points(const CartesianGrid& g, const ObservabilityConfig& cfg) {
  std::vector<std::size_t> idx;
  for (int i = 0; i < g.points; ++i)
    for (int j = 0; j < g.points; ++j)
      if (cfg.contains(g.coord(i), g.coord(j))) idx.push_back(static_cast<std::size_t>(i) * g.points + j);
  return idx;
}

}  // namespace

EvolutionReport evolve_and_observe(const CartesianField& u, const core::PotentialModel& model,
                                   const ObservabilityConfig& cfg, const EvolutionOptions& opts) {
  cfg.validate();
  const auto& g = u.grid();
  const auto inside = omega_points(g, cfg);
  const double cell = g.spacing() * g.spacing();
  EvolutionReport rep;
  rep.h = u.h();
  split_step_evolve(u, model, cfg.dt, cfg.steps(), opts, [&](int n, const CartesianField& w) {
    double f = 0.0;
    for (std::size_t k : inside) f += std::norm(w.samples()[k]);
    f *= cell;
    const double t = n * cfg.dt;
    const double prev = rep.cumulative.empty() ? 0.0 : rep.cumulative.back();
    rep.cumulative.push_back(n == 0 ? 0.0 : prev + 0.5 * cfg.dt * (rep.region_mass.back() + f));
    rep.times.push_back(t);
    rep.region_mass.push_back(f);
    rep.norm.push_back(w.norm());
    rep.norm_drift = std::max(rep.norm_drift, std::abs(rep.norm.back() - rep.norm.front()));
  });
  return rep;
}

void write_evolution_csv(std::ostream& out, const EvolutionReport& report) {
  out << "t,F_m,cumulative,norm\n";
  for (std::size_t i = 0; i < report.times.size(); ++i)
    out << core::fmt(report.times[i]) << ',' << core::fmt(report.region_mass[i]) << ','
        << core::fmt(report.cumulative[i]) << ',' << core::fmt(report.norm[i]) << '\n';
}

ObservabilityResult observability_experiment(const quasimodes::QuasimodeSpec& spec, const core::PotentialModel& model,
                                             const std::vector<double>& h_list, const ObservabilityConfig& cfg,
                                             const CartesianGrid& grid, unsigned threads) {
  if (h_list.empty()) throw std::invalid_argument("observability: empty h list");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1])) throw std::invalid_argument("observability: h list must strictly decrease");
  cfg.validate();
  spec.validate(model);
  ObservabilityResult out;
  out.reports.resize(h_list.size());
  core::parallel_for(h_list.size(), threads, [&](std::size_t m) {
    const double h = h_list[m];
    const auto u = quasimodes::build_quasimode_factors(spec, h, quasimodes::quasimode_grid(spec, h));
    const double residual = quasimodes::residual_norm(u, model, spec.energy);
    const auto moved = polar_to_cartesian(u, grid);
    EvolutionReport rep = evolve_and_observe(moved.field, model, cfg);
    rep.residual_norm = residual;
    rep.transport_deficit = moved.deficit;
    out.reports[m] = std::move(rep);
  });
  out.nonincreasing = true;
  for (std::size_t m = 0; m < out.reports.size(); ++m) {
    out.integrals.push_back(out.reports[m].integral());
    if (m > 0 && out.integrals[m] > out.integrals[m - 1] + 1e-9) out.nonincreasing = false;
  }
  out.final_small = out.integrals.back() <= 0.1 * cfg.T;
  return out;
}

FmBound fm_bound_check(const std::vector<EvolutionReport>& reports, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("fm_bound_check: T must be positive");
  FmBound b;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : reports) {
    if (r.region_mass.empty()) throw std::invalid_argument("fm_bound_check: empty report");
    double rise = 0.0;
    for (double f : r.region_mass) rise = std::max(rise, f - r.region_mass.front());
    double c;
    if (r.residual_norm > 0.0)
      c = rise / (r.residual_norm * T);
    else
      c = rise <= 1e-6 ? 0.0 : std::numeric_limits<double>::infinity();
    b.constants.push_back(c);
    b.fitted_C = std::max(b.fitted_C, c);
    if (c > 0.0 && std::isfinite(c)) lo = std::min(lo, c), hi = std::max(hi, c);
  }
  b.spread = hi > 0.0 ? hi / lo : 1.0;
  b.pass = b.fitted_C <= 10.0;
  return b;
}

}  // namespace semilab::propagation
