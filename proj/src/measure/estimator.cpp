#include "semilab/measure/estimator.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "semilab/core/errors.hpp"
#include "semilab/core/format.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/propagation/transport.hpp"

namespace semilab::measure {

namespace {

void require_geometric(const std::vector<double>& h) {
  if (h.size() < 4) throw std::invalid_argument("pairing_sweep: need at least 4 h values");
  const double ratio = h[1] / h[0];
  for (std::size_t i = 1; i < h.size(); ++i)
    if (!(h[i] > 0.0) || !(ratio < 1.0) || std::abs(h[i] / h[i - 1] - ratio) > 1e-6 * ratio)
      throw std::invalid_argument("pairing_sweep: h values must decrease geometrically");
}

}  // namespace

CartesianGrid sweep_grid(const quasimodes::QuasimodeSpec& spec, double h, const SweepOptions& opts) {
  const double r_max = spec.radial_hi / quasimodes::radial_scale(spec, h);
  CartesianGrid g;
  g.half_width = opts.box_factor * r_max;
  g.points = 16;
  while (2.0 * g.half_width / g.points > opts.max_spacing) g.points *= 2;
  return g;
}

PairingTable pairing_sweep(const quasimodes::QuasimodeSpec& spec, const core::PotentialModel& model,
                           const SymbolDictionary& dict, const std::vector<double>& h_list,
                           const core::CutoffFamily& cutoff, const SweepOptions& opts) {
  require_geometric(h_list);
  if (cutoff.kind() != core::CutoffKind::JStep && cutoff.kind() != core::CutoffKind::JLog)
    throw std::invalid_argument("pairing_sweep: cutoff must be j-step or J-log");
  spec.validate(model);
  const auto symbols = dict.symbols();
  PairingTable table;
  for (double h : h_list) {
    std::vector<quantization::PairingValue> values;
    std::string failure;
    try {
      const auto u = quasimodes::build_quasimode_factors(spec, h, quasimodes::quasimode_grid(spec, h, opts.policy));
      const auto moved = propagation::polar_to_cartesian(u, sweep_grid(spec, h, opts));
      values = quantization::weyl_pairings(moved.field, symbols, cutoff, {opts.stride, opts.threads});
    } catch (const Error& e) {
      failure = e.what();
    } catch (const std::domain_error& e) {
      failure = e.what();
    }
    for (std::size_t s = 0; s < symbols.size(); ++s) {
      quantization::PairingRow row;
      row.h = h;
      row.symbol_id = dict.entries()[s].name;
      row.cutoff_id = cutoff.id();
      if (failure.empty()) {
        row.value = values[s].value;
        row.error = values[s].error_estimate;
      } else {
        row.valid = false;
        row.note = failure;
      }
      table.add(std::move(row));
    }
  }
  return table;
}

Extrapolation extrapolate(const std::vector<double>& h, const std::vector<double>& v, double tol) {
  if (h.size() != v.size()) throw std::invalid_argument("extrapolate: size mismatch");
  Extrapolation best;
  best.points = static_cast<int>(h.size());
  if (h.empty()) return best;
  best.last_value = v.back();
  if (h.size() < 3) {
    best.limit = v.back();
    best.error_bar = std::numeric_limits<double>::infinity();
    return best;
  }
  const double n = static_cast<double>(h.size());
  double best_ssr = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= 150; ++step) {
    const double p = 0.5 + 0.01 * step;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double x = std::pow(h[i], p);
      sx += x, sy += v[i], sxx += x * x, sxy += x * v[i];
    }
    const double det = n * sxx - sx * sx;
    if (!(std::abs(det) > 0.0)) continue;
    const double c = (n * sxy - sx * sy) / det;
    const double a = (sy - c * sx) / n;
    double ssr = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) ssr += std::pow(v[i] - a - c * std::pow(h[i], p), 2);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best.limit = a;
      best.coefficient = c;
      best.exponent = p;
    }
  }
  best.residual = std::sqrt(best_ssr / n);
  best.error_bar = std::abs(best.last_value - best.limit) + best.residual;
  best.conclusive = best.error_bar <= std::max(std::abs(best.limit), tol);
  return best;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

bool LocalizationReport::all_pass() const {
  return off_support == Verdict::Pass && shell == Verdict::Pass && mass == Verdict::Pass;
}

namespace {

// Combine per-probe outcomes: any conclusive violation fails, otherwise any
// inconclusive probe leaves the verdict open.
struct Tally {
  bool any = false, failed = false, open = false;
  void add(const Extrapolation& fit, bool ok) {
    any = true;
    if (!fit.conclusive)
      open = true;
    else if (!ok)
      failed = true;
  }
  Verdict verdict() const {
    if (failed) return Verdict::Fail;
    if (open || !any) return Verdict::Inconclusive;
    return Verdict::Pass;
  }
};

}  // namespace

LocalizationReport localization_report(const PairingTable& table, const SymbolDictionary& dict,
                                       const std::string& cutoff_id, double tol) {
  LocalizationReport rep;
  rep.tol = tol;
  Tally off, shell;
  const SymbolLimit* narrowest = nullptr;
  rep.max_total_mass = -std::numeric_limits<double>::infinity();
  for (const auto& e : dict.entries()) {
    std::vector<double> hs, vs;
    for (const auto& row : table.series(e.name, cutoff_id))
      if (row.valid) hs.push_back(row.h), vs.push_back(row.value);
    rep.limits.push_back({e.name, e.tag, extrapolate(hs, vs, tol)});
  }
  for (const auto& l : rep.limits) {
    switch (l.tag) {
      case SymbolTag::OffSupport: off.add(l.fit, std::abs(l.fit.limit) <= tol); break;
      case SymbolTag::ShellProbe: shell.add(l.fit, std::abs(l.fit.limit) <= tol); break;
      case SymbolTag::ApproxIdentity:
        narrowest = &l;
        rep.max_total_mass = std::max(rep.max_total_mass, l.fit.limit);
        break;
      case SymbolTag::OnSupport: break;
    }
  }
  rep.off_support = off.verdict();
  rep.shell = shell.verdict();
  if (narrowest) {
    rep.mass_estimate = narrowest->fit.limit;
    Tally mass;
    mass.add(narrowest->fit, narrowest->fit.limit >= 1.0 - tol);
    rep.mass = mass.verdict();
  } else {
    rep.max_total_mass = 0.0;
  }
  return rep;
}

void write_localization_json(std::ostream& out, const LocalizationReport& report) {
  nlohmann::ordered_json j;
  j["tol"] = report.tol;
  j["verdicts"] = {{"off_support", to_string(report.off_support)},
                   {"shell", to_string(report.shell)},
                   {"mass", to_string(report.mass)}};
  j["mass_estimate"] = report.mass_estimate;
  j["max_total_mass"] = report.max_total_mass;
  auto& arr = j["limits"] = nlohmann::ordered_json::array();
  for (const auto& l : report.limits) {
    arr.push_back({{"name", l.name},
                   {"tag", to_string(l.tag)},
                   {"limit", l.fit.limit},
                   {"error_bar", std::isfinite(l.fit.error_bar) ? nlohmann::ordered_json(l.fit.error_bar)
                                                                : nlohmann::ordered_json(nullptr)},
                   {"exponent", l.fit.exponent},
                   {"residual", l.fit.residual},
                   {"last_value", l.fit.last_value},
                   {"points", l.fit.points},
                   {"conclusive", l.fit.conclusive}});
  }
  out << j.dump(2) << '\n';
}

std::pair<double, double> tail_masses(const quasimodes::SeparableField& u, double c) {
  if (!(c > 0.0 && c < 1.0)) throw std::domain_error("tail_masses: c(h) must lie in (0, 1), got " + core::fmt(c));
  const double L = std::log(1.0 / c);
  const auto& g = u.grid;
  double j = 0.0, jt = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    const double m = std::norm(u.radial[i]);
    if (m == 0.0) continue;
    const double rho = u.h * g.r(i);
    if (!(rho > 0.0)) continue;
    const double lr = std::log(rho) / L;
    j += m * std::pow(core::j_step(lr), 2) * g.r(i);
    jt += m * std::pow(core::j_step(4.0 * lr), 2) * g.r(i);
  }
  const double ang = quasimodes::angular_norm_squared(g, u.angular);
  return {std::sqrt(j * g.dr() * ang), std::sqrt(jt * g.dr() * ang)};
}

std::vector<TailMassRow> tail_mass_diagnostic(const quasimodes::QuasimodeSpec& spec,
                                              const core::PotentialModel& model, const std::vector<double>& h_list,
                                              double delta, const std::vector<core::ResidualSample>& residual_table,
                                              const quasimodes::GridPolicy& policy) {
  spec.validate(model);
  std::vector<quasimodes::SeparableField> fields;
  std::vector<core::ResidualSample> table = residual_table;
  for (double h : h_list) {
    fields.push_back(quasimodes::build_quasimode_factors(spec, h, quasimodes::quasimode_grid(spec, h, policy)));
    if (residual_table.empty()) table.push_back({h, quasimodes::residual_norm(fields.back(), model, spec.energy)});
  }
  std::vector<TailMassRow> rows;
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    TailMassRow row;
    row.h = h_list[i];
    for (const auto& s : table)
      if (s.h == row.h) row.residual_norm = s.residual_norm;
    row.c = core::c_of_h(table, delta, row.h);
    if (row.c < 1.0) {
      std::tie(row.j_norm, row.j_tilde_norm) = tail_masses(fields[i], row.c);
    } else {
      row.j_norm = row.j_tilde_norm = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_tail_mass_csv(std::ostream& out, const std::vector<TailMassRow>& rows) {
  out << "h,c,residual_norm,J_norm,J_tilde_norm\n";
  for (const auto& r : rows)
    out << core::fmt(r.h) << ',' << core::fmt(r.c) << ',' << core::fmt(r.residual_norm) << ','
        << (std::isnan(r.j_norm) ? std::string("nan") : core::fmt(r.j_norm)) << ','
        << (std::isnan(r.j_tilde_norm) ? std::string("nan") : core::fmt(r.j_tilde_norm)) << '\n';
}

}  // namespace semilab::measure
