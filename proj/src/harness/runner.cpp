#include "semilab/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "semilab/core/errors.hpp"
#include "semilab/core/format.hpp"
#include "semilab/core/parallel.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/flow/induced_flow.hpp"
#include "semilab/measure/dictionary.hpp"
#include "semilab/measure/estimator.hpp"
#include "semilab/propagation/observability.hpp"
#include "semilab/quantization/operator_bounds.hpp"
#include "semilab/quasimodes/quasimode.hpp"

namespace semilab::harness {

using nlohmann::ordered_json;
using core::fmt;

namespace {

struct StageOutcome {
  bool pass = true;
  std::string message;
};

struct Context {
  const ExperimentConfig& cfg;
  ArtifactStore& store;
};

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Short decimal form of h for file names.
std::string h_tag(double h) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", h);
  return buf;
}

// ---- flow

std::vector<flow::PhasePoint> flow_ensemble(const ExperimentConfig& cfg) {
  if (!cfg.flow.initial_conditions.empty()) return cfg.flow.initial_conditions;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> rho(0.5, 1.0), eta(-0.5, 0.5), angle(0.0, core::kTwoPi);
  std::vector<flow::PhasePoint> out;
  for (int i = 0; i < cfg.flow.random_count; ++i) {
    // Fixed draw order so the ensemble depends on the seed alone.
    const double r = rho(rng), t = angle(rng), e = eta(rng);
    out.push_back({r, t, e});
  }
  return out;
}

StageOutcome run_flow(Context& ctx) {
  const auto& f = ctx.cfg.flow;
  const auto ics = flow_ensemble(ctx.cfg);
  if (ics.empty()) throw ConfigError("flow.initial_conditions", "no initial conditions to integrate");
  struct Slot {
    flow::Trajectory traj;
    double drift = 0.0;
    std::optional<flow::AsymptoticReport> asym;
    std::string csv;
  };
  std::vector<Slot> slots(ics.size());
  flow::FlowOptions opt;
  opt.tol = f.tol;
  opt.output_samples = static_cast<std::size_t>(f.output_samples);
  core::parallel_for(ics.size(), ctx.cfg.threads, [&](std::size_t i) {
    auto& s = slots[i];
    s.traj = flow::integrate_flow(ics[i], ctx.cfg.model, f.t_end, f.tol, opt);
    s.drift = flow::check_energy_conservation(s.traj);
    if (s.traj.fixed_point || s.traj.size() >= 500) s.asym = flow::asymptotic_diagnostics(s.traj, ctx.cfg.model);
    std::ostringstream os;
    flow::write_trajectory_csv(os, s.traj);
    s.csv = os.str();
  });

  const double drift_limit = 100.0 * f.tol;
  bool pass = true;
  double max_drift = 0.0;
  ordered_json runs = ordered_json::array();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& s = slots[i];
    char name[40];
    std::snprintf(name, sizeof name, "trajectory_%03zu.csv", i);
    ctx.store.write(name, s.csv);
    max_drift = std::max(max_drift, s.drift);
    bool ok = s.drift <= drift_limit;
    ordered_json r = {{"file", name},
                      {"initial", {ics[i].rho, ics[i].theta, ics[i].eta}},
                      {"fixed_point", s.traj.fixed_point},
                      {"accepted_steps", s.traj.accepted_steps},
                      {"rejected_steps", s.traj.rejected_steps},
                      {"energy_drift", s.drift}};
    if (s.asym) {
      const auto& a = *s.asym;
      const bool settles = a.rho_monotone && a.tail_max_eta <= 1e-3 && a.tail_max_dV <= 1e-3 && a.integrals_bounded;
      ok = ok && settles;
      r["asymptotics"] = {{"rho_monotone", a.rho_monotone},     {"rho_limit", a.rho_limit},
                          {"theta_limit", a.theta_limit},       {"energy", a.energy},
                          {"tail_max_eta", a.tail_max_eta},     {"tail_max_dV", a.tail_max_dV},
                          {"q_tail_increase", a.q_tail_increase}, {"g_tail_increase", a.g_tail_increase},
                          {"integrals_bounded", a.integrals_bounded}};
    } else {
      r["asymptotics"] = nullptr;
    }
    r["pass"] = ok;
    pass = pass && ok;
    runs.push_back(std::move(r));
  }
  ordered_json j = {{"t_end", f.t_end},
                    {"tol", f.tol},
                    {"drift_limit", drift_limit},
                    {"max_energy_drift", max_drift},
                    {"runs", runs},
                    {"pass", pass}};
  ctx.store.write("flow_diagnostics.json", dump(j));
  return {pass, "max energy drift " + fmt(max_drift)};
}

// ---- quasimode

// Slope window for the family: concentrated degenerate minima beat h, the rest sit near h.
std::pair<double, double> slope_window(const quasimodes::QuasimodeSpec& s) {
  const double inf = std::numeric_limits<double>::infinity();
  if (s.case_id == 1 && s.k >= 2) return {1.1, inf};
  if (s.case_id == 2 && s.k >= 1) return {0.8, inf};
  return {0.8, 1.1};
}

ordered_json spec_json(const quasimodes::QuasimodeSpec& s) {
  return {{"case", s.case_id},       {"k", s.k},           {"epsilon", s.epsilon_exp}, {"theta0", s.theta0},
          {"support_constant", s.support_constant},      {"radial_lo", s.radial_lo}, {"radial_hi", s.radial_hi},
          {"energy", s.energy},      {"e1", s.e1},         {"e2", s.e2}};
}

StageOutcome run_quasimode(Context& ctx) {
  const auto spec = quasimode_spec(ctx.cfg);
  const auto& h_list = ctx.cfg.quasimode.h_list;
  const auto table = quasimodes::residual_scaling(spec, ctx.cfg.model, h_list, {}, ctx.cfg.threads);
  std::ostringstream csv;
  quasimodes::write_residual_csv(csv, table);
  ctx.store.write("residual.csv", csv.str());

  const auto [lo, hi] = slope_window(spec);
  constexpr double kOracleLimit = 1e-3;
  const bool slope_ok = table.slope >= lo && table.slope <= hi;
  const bool oracle_ok = table.max_oracle_discrepancy <= kOracleLimit;

  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"h", r.h},
                    {"residual_norm", r.residual_norm},
                    {"oracle_residual", r.oracle_residual},
                    {"n_r", r.n_r},
                    {"n_theta", r.n_theta}});
  // The finest member supplies the support diagnostic.
  const double h_min = h_list.back();
  const auto grid = quasimodes::quasimode_grid(spec, h_min);
  const auto u = quasimodes::build_quasimode_factors(spec, h_min, grid);
  const double collar_exp = 1.0 / quasimodes::ell(spec.k);
  const auto support = quasimodes::support_report(u, spec.theta0, spec.support_constant, collar_exp);

  ordered_json j = {{"spec", spec_json(spec)},
                    {"rows", rows},
                    {"slope", table.slope},
                    {"slope_min", lo},
                    {"slope_max", std::isfinite(hi) ? ordered_json(hi) : ordered_json(nullptr)},
                    {"max_oracle_discrepancy", table.max_oracle_discrepancy},
                    {"oracle_limit", kOracleLimit},
                    {"support", {{"h", h_min},
                                 {"C", spec.support_constant},
                                 {"exponent", collar_exp},
                                 {"mass_outside", support.mass_outside},
                                 {"contained", support.contained}}},
                    {"pass", slope_ok && oracle_ok}};
  ctx.store.write("quasimode.json", dump(j));

  if (ctx.cfg.quasimode.export_field) {
    std::ostringstream f;
    f << "axis,index,coord,re,im\n";
    for (int i = 0; i < grid.n_r; ++i)
      f << "r," << i << ',' << fmt(grid.r(i)) << ',' << fmt(u.radial[i].real()) << ',' << fmt(u.radial[i].imag())
        << '\n';
    for (int k = 0; k < grid.n_theta; ++k)
      f << "theta," << k << ',' << fmt(grid.theta(k)) << ',' << fmt(u.angular[k].real()) << ','
        << fmt(u.angular[k].imag()) << '\n';
    ctx.store.write("quasimode_factors.csv", f.str());
  }
  std::string msg = "slope " + fmt(table.slope);
  if (!oracle_ok) msg += "; oracle discrepancy " + fmt(table.max_oracle_discrepancy);
  return {slope_ok && oracle_ok, msg};
}

// ---- pairings

StageOutcome run_pairings(Context& ctx) {
  const auto spec = quasimode_spec(ctx.cfg);
  const auto& p = ctx.cfg.pairings;
  const auto residuals = quasimodes::residual_scaling(spec, ctx.cfg.model, p.h_list, {}, ctx.cfg.threads);
  std::vector<core::ResidualSample> samples;
  for (const auto& r : residuals.rows) samples.push_back({r.h, r.residual_norm});

  core::CutoffParams cp;
  if (p.cutoff == "J-log") cp.log_scale = core::LogScaleParams{p.delta, samples};
  const auto cutoff = core::make_cutoff(core::cutoff_kind_from_string(p.cutoff), cp, p.cutoff);
  const auto dict = measure::default_dictionary(ctx.cfg.model, spec.energy, spec.theta0);
  measure::SweepOptions so;
  so.max_spacing = p.max_spacing;
  so.box_factor = p.box_factor;
  so.stride = p.stride;
  so.threads = ctx.cfg.threads;
  const auto table = measure::pairing_sweep(spec, ctx.cfg.model, dict, p.h_list, cutoff, so);
  std::ostringstream csv;
  table.write_csv(csv);
  ctx.store.write("pairings.csv", csv.str());

  const auto report = measure::localization_report(table, dict, cutoff.id(), ctx.cfg.tol);
  std::ostringstream js;
  measure::write_localization_json(js, report);
  ctx.store.write("localization.json", js.str());

  // Diagnostic only: no verdict attaches to the tail masses.
  const auto tails = measure::tail_mass_diagnostic(spec, ctx.cfg.model, p.h_list, p.delta, samples);
  std::ostringstream tcsv;
  measure::write_tail_mass_csv(tcsv, tails);
  ctx.store.write("tail_mass.csv", tcsv.str());

  return {report.all_pass(), "off-support " + measure::to_string(report.off_support) + ", shell " +
                                 measure::to_string(report.shell) + ", mass " + measure::to_string(report.mass) +
                                 " (" + fmt(report.mass_estimate) + ")"};
}

// ---- observability

StageOutcome run_observability(Context& ctx) {
  const auto spec = quasimode_spec(ctx.cfg);
  const auto& o = ctx.cfg.observability;
  propagation::ObservabilityConfig oc;
  oc.omega = propagation::OmegaKind::CollarComplement;
  oc.theta0 = spec.theta0;
  oc.C = o.C;
  oc.exponent = observability_exponent(ctx.cfg);
  oc.R = o.R;
  oc.T = o.T;
  oc.dt = o.dt;
  const quantization::CartesianGrid grid{o.half_width, o.points};
  const auto res = propagation::observability_experiment(spec, ctx.cfg.model, o.h_list, oc, grid, ctx.cfg.threads);
  const auto bound = propagation::fm_bound_check(res.reports, o.T);

  ordered_json runs = ordered_json::array();
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const auto& r = res.reports[i];
    const std::string name = "evolution_h" + h_tag(r.h) + ".csv";
    std::ostringstream csv;
    propagation::write_evolution_csv(csv, r);
    ctx.store.write(name, csv.str());
    runs.push_back({{"h", r.h},
                    {"file", name},
                    {"integral", r.integral()},
                    {"residual_norm", r.residual_norm},
                    {"norm_drift", r.norm_drift},
                    {"transport_deficit", r.transport_deficit},
                    {"fm_constant", bound.constants[i]}});
  }
  const bool pass = res.nonincreasing && res.final_small && bound.pass;
  ordered_json j = {{"spec", spec_json(spec)},
                    {"omega", {{"kind", "collar-complement"}, {"C", oc.C}, {"exponent", oc.exponent}, {"R", oc.R}}},
                    {"grid", {{"half_width", grid.half_width}, {"points", grid.points}}},
                    {"T", oc.T},
                    {"dt", oc.dt},
                    {"runs", runs},
                    {"nonincreasing", res.nonincreasing},
                    {"final_small", res.final_small},
                    {"fm_fitted_C", std::isfinite(bound.fitted_C) ? ordered_json(bound.fitted_C) : ordered_json(nullptr)},
                    {"fm_spread", bound.spread},
                    {"fm_pass", bound.pass},
                    {"pass", pass}};
  ctx.store.write("observability.json", dump(j));
  return {pass, "final integral " + fmt(res.integrals.back()) + ", fm C " + fmt(bound.fitted_C)};
}

// ---- operator bounds

StageOutcome run_gaarding(Context& ctx) {
  const auto& g = ctx.cfg.gaarding;
  const auto a = core::SymbolSpec::bump3(g.rho, g.theta, g.w, g.radius);
  const auto f = core::make_cutoff(core::CutoffKind::CustomSmooth, {}, "custom-smooth");
  quantization::OperatorBoundOptions opt;
  opt.points = g.points;
  opt.trials = g.trials;
  opt.seed = ctx.cfg.seed;
  const auto cv = quantization::calderon_vaillancourt_check(a, f, g.h_list, opt);
  const auto gr = quantization::garding_check(a, f, g.h_list, opt);

  ordered_json cvs = ordered_json::array(), grs = ordered_json::array();
  for (const auto& s : cv.samples)
    cvs.push_back({{"h", s.h},
                   {"symbol_sup", s.symbol_sup},
                   {"random_pair_max", s.random_pair_max},
                   {"norm_estimate", s.norm_estimate}});
  for (const auto& s : gr.samples)
    grs.push_back({{"h", s.h}, {"min_trial_pairing", s.min_trial_pairing}, {"min_estimate", s.min_estimate}});
  ordered_json j = {
      {"symbol", {{"kind", "bump3"}, {"rho", g.rho}, {"theta", g.theta}, {"w", g.w}, {"radius", g.radius}}},
      {"points", g.points},
      {"trials", g.trials},
      {"constant_limit", opt.constant_limit},
      {"calderon_vaillancourt",
       {{"samples", cvs}, {"fitted_C", cv.fitted_C}, {"fitted_c", cv.fitted_c}, {"pass", cv.pass}}},
      {"garding",
       {{"samples", grs}, {"fitted_C", gr.fitted_C}, {"slope", gr.slope}, {"violations", gr.violations},
        {"pass", gr.pass}}},
      {"pass", cv.pass && gr.pass}};
  ctx.store.write("operator_bounds.json", dump(j));
  return {cv.pass && gr.pass, "norm C " + fmt(cv.fitted_C) + ", Garding C " + fmt(gr.fitted_C)};
}

using StageFn = StageOutcome (*)(Context&);

std::vector<std::pair<ExperimentKind, StageFn>> stages_for(ExperimentKind kind) {
  const std::vector<std::pair<ExperimentKind, StageFn>> all = {
      {ExperimentKind::Flow, run_flow},
      {ExperimentKind::Quasimode, run_quasimode},
      {ExperimentKind::Pairings, run_pairings},
      {ExperimentKind::Observability, run_observability},
      {ExperimentKind::Gaarding, run_gaarding}};
  if (kind == ExperimentKind::Suite) return all;
  for (const auto& s : all)
    if (s.first == kind) return {s};
  return {};
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::optional<ExperimentKind> kind,
              std::ostream* log) {
  if (kind && cfg.kind && *kind != *cfg.kind)
    throw ConfigError("kind", "config is for '" + to_string(*cfg.kind) + "' but '" + to_string(*kind) +
                                  "' was requested");
  const auto chosen = kind ? kind : cfg.kind;
  if (!chosen) throw ConfigError("kind", "no experiment kind given in the config or on the command line");

  const std::string resolved = dump(cfg.resolved());
  ArtifactStore store(out_dir);
  store.write("config.resolved.json", resolved);

  RunResult result;
  auto& m = result.manifest;
  m.tool_version = tool_version();
  m.config_hash = sha256_hex(resolved);
  m.seed = cfg.seed;

  Context ctx{cfg, store};
  bool config_error = false, numerical_error = false, verdict_failure = false;
  for (const auto& [k, fn] : stages_for(*chosen)) {
    StageRecord rec;
    rec.name = to_string(k);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto out = fn(ctx);
      rec.status = out.pass ? "pass" : "fail";
      rec.message = out.message;
      verdict_failure = verdict_failure || !out.pass;
    } catch (const ConfigError& e) {
      rec.status = "config-error";
      rec.message = e.what();
      config_error = true;
    } catch (const std::invalid_argument& e) {
      rec.status = "config-error";
      rec.message = e.what();
      config_error = true;
    } catch (const std::exception& e) {
      rec.status = "numerical-error";
      rec.message = e.what();
      numerical_error = true;
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (log)
      *log << "[" << rec.name << "] " << rec.status << " (" << std::fixed << std::setprecision(2) << rec.wall_seconds
           << " s)" << std::defaultfloat << ": " << rec.message << "\n";
    m.stages.push_back(std::move(rec));
  }
  m.files = store.records();
  store.write("manifest.json", dump(m.to_json()));

  result.exit_code = config_error ? kConfigError : numerical_error ? kNumericalFailure
                                                 : verdict_failure ? kVerdictFailure
                                                                   : kPass;
  return result;
}

}  // namespace semilab::harness
