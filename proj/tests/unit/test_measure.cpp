#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "semilab/core/smooth.hpp"
#include "semilab/measure/estimator.hpp"

using namespace semilab;
using namespace semilab::measure;
using core::PotentialModel;

namespace {

SymbolDictionary prefixed(const SymbolDictionary& d, const std::string& prefix) {
  SymbolDictionary out;
  for (const auto& e : d.entries()) out.add(prefix + e.name, e.tag, e.symbol);
  return out;
}

void append(SymbolDictionary& into, const SymbolDictionary& from) {
  for (const auto& e : from.entries()) into.add(e.name, e.tag, e.symbol);
}

// One sweep of the k = 3 family serves three dictionaries: the correct one, one
// mis-centred by 1 rad and one whose shell probe uses E + 1.
struct QuarticSweep {
  PotentialModel model = PotentialModel::degenerate_quartic();
  quasimodes::QuasimodeSpec spec = quasimodes::make_case1_spec(model, 0.0, 3);
  core::CutoffFamily cutoff = core::make_cutoff(core::CutoffKind::JStep, {}, "j");
  SymbolDictionary base = prefixed(default_dictionary(model, 0.0, 0.0), "base/");
  SymbolDictionary shifted = prefixed(default_dictionary(model, 0.0, 1.0), "shift/");
  SymbolDictionary wrong_e = prefixed(default_dictionary(model, 1.0, 0.0), "e1/");
  SymbolDictionary zero;
  PairingTable table;

  QuarticSweep() {
    zero.add("zero", SymbolTag::OffSupport, core::SymbolSpec::constant(0.0));
    SymbolDictionary all;
    append(all, base);
    append(all, shifted);
    append(all, wrong_e);
    append(all, zero);
    table = pairing_sweep(spec, model, all, {0.2, 0.1, 0.05, 0.025}, cutoff);
  }
};

const QuarticSweep& sweep() {
  static const QuarticSweep s;
  return s;
}

}  // namespace

TEST(Dictionary, TagsAndNames) {
  const auto q = PotentialModel::degenerate_quartic();
  const auto d = default_dictionary(q, 0.0, 0.0);
  EXPECT_EQ(d.find("critical-0").tag, SymbolTag::OnSupport);   // θ = 0, V = 0 = E
  EXPECT_EQ(d.find("critical-1").tag, SymbolTag::OffSupport);  // θ = π, V = 4
  EXPECT_EQ(d.find("shell").tag, SymbolTag::ShellProbe);
  int identities = 0;
  for (const auto& e : d.entries()) identities += e.tag == SymbolTag::ApproxIdentity;
  EXPECT_EQ(identities, 3);
  SymbolDictionary dup;
  dup.add("a", SymbolTag::OnSupport, core::SymbolSpec::constant(1.0));
  EXPECT_THROW(dup.add("a", SymbolTag::OnSupport, core::SymbolSpec::constant(1.0)), std::invalid_argument);
  EXPECT_THROW(d.find("missing"), std::out_of_range);
}

TEST(Extrapolate, RecoversPowerLaw) {
  std::vector<double> h = {0.2, 0.1, 0.05, 0.025}, v, w;
  for (double x : h) v.push_back(0.3 + 2.0 * x), w.push_back(-0.1 + 0.5 * std::pow(x, 0.73));
  const auto a = extrapolate(h, v, 0.1);
  EXPECT_NEAR(a.limit, 0.3, 1e-9);
  EXPECT_NEAR(a.exponent, 1.0, 1e-12);
  EXPECT_TRUE(a.conclusive);
  EXPECT_GE(a.error_bar, 0.0);
  const auto b = extrapolate(h, w, 0.1);
  EXPECT_NEAR(b.limit, -0.1, 1e-9);
  EXPECT_NEAR(b.exponent, 0.73, 1e-9);
}

TEST(Extrapolate, FlagsNonConvergence) {
  const std::vector<double> h = {0.2, 0.1, 0.05, 0.025};
  EXPECT_FALSE(extrapolate(h, {1.0, -1.0, 1.0, -1.0}, 0.1).conclusive);
  EXPECT_FALSE(extrapolate({0.2, 0.1}, {1.0, 1.0}, 0.1).conclusive);
}

TEST(PairingSweep, Preconditions) {
  const auto& s = sweep();
  EXPECT_THROW(pairing_sweep(s.spec, s.model, s.zero, {0.2, 0.1, 0.05}, s.cutoff), std::invalid_argument);
  EXPECT_THROW(pairing_sweep(s.spec, s.model, s.zero, {0.2, 0.1, 0.05, 0.01}, s.cutoff), std::invalid_argument);
  const auto window = core::make_cutoff(core::CutoffKind::CustomSmooth);
  EXPECT_THROW(pairing_sweep(s.spec, s.model, s.zero, {0.4, 0.2, 0.1, 0.05}, window), std::invalid_argument);
}

TEST(PairingSweep, LogCutoffFailuresBecomeInvalidCells) {
  const auto& s = sweep();
  core::CutoffParams p;
  // ‖R‖/h = 10 forces c(h) ≥ 1 where the log-scale cutoff is undefined.
  p.log_scale = core::LogScaleParams{0.5, {{0.4, 4.0}, {0.2, 2.0}, {0.1, 1.0}, {0.05, 0.5}}};
  const auto jlog = core::make_cutoff(core::CutoffKind::JLog, p, "J");
  const auto t = pairing_sweep(s.spec, s.model, s.zero, {0.4, 0.2, 0.1, 0.05}, jlog);
  ASSERT_EQ(t.rows().size(), 4u);
  for (const auto& r : t.rows()) {
    EXPECT_FALSE(r.valid);
    EXPECT_FALSE(r.note.empty());
  }
  std::ostringstream os;
  t.write_csv(os);
  EXPECT_NE(os.str().find("nan"), std::string::npos);
}

TEST(PairingSweep, ZeroSymbolAndIdentity) {
  const auto& s = sweep();
  for (const auto& r : s.table.series("zero", "j")) EXPECT_EQ(r.value, 0.0);
  const auto id = s.table.series("base/identity-0", "j");
  ASSERT_EQ(id.size(), 4u);
  EXPECT_NEAR(id.back().value, 1.0, 5e-2);
  const auto off = s.table.series("base/off-rho-plus", "j");
  EXPECT_LE(std::abs(off.back().value), 5e-2);
}

TEST(Localization, QuarticFamilyPasses) {
  const auto& s = sweep();
  const auto rep = localization_report(s.table, s.base, "j", 0.1);
  EXPECT_EQ(rep.off_support, Verdict::Pass);
  EXPECT_EQ(rep.shell, Verdict::Pass);
  EXPECT_EQ(rep.mass, Verdict::Pass);
  EXPECT_GE(rep.mass_estimate, 0.9);
  EXPECT_LE(rep.max_total_mass, 1.0 + 0.1);
  for (const auto& l : rep.limits) {
    EXPECT_GE(l.fit.error_bar, 0.0) << l.name;
    // Verdict inputs are all stored: the tag, limit, error bar and tolerance.
    if (l.tag == SymbolTag::OffSupport || l.tag == SymbolTag::ShellProbe)
      EXPECT_LE(std::abs(l.fit.limit), rep.tol) << l.name;
  }
  std::ostringstream os;
  write_localization_json(os, rep);
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["verdicts"]["mass"], "pass");
  EXPECT_EQ(j["limits"].size(), s.base.entries().size());
}

TEST(Localization, MisCentredDictionaryFailsMass) {
  const auto& s = sweep();
  const auto rep = localization_report(s.table, s.shifted, "j", 0.1);
  EXPECT_EQ(rep.mass, Verdict::Fail);
}

TEST(Localization, WrongEnergyFailsShell) {
  const auto& s = sweep();
  const auto rep = localization_report(s.table, s.wrong_e, "j", 0.1);
  EXPECT_EQ(rep.shell, Verdict::Fail);
}

TEST(Localization, MonotoneInNestedProbes) {
  const auto& s = sweep();
  const auto rep = localization_report(s.table, s.base, "j", 0.1);
  // identity-2 ≤ identity-1 ≤ identity-0 pointwise
  std::vector<Extrapolation> fits;
  for (const auto& l : rep.limits)
    if (l.tag == SymbolTag::ApproxIdentity) fits.push_back(l.fit);
  ASSERT_EQ(fits.size(), 3u);
  for (std::size_t i = 1; i < fits.size(); ++i)
    EXPECT_LE(fits[i].limit, fits[i - 1].limit + 2.0 * (fits[i].error_bar + fits[i - 1].error_bar));
}

TEST(PairingSweep, Reproducible) {
  const auto& s = sweep();
  auto run = [&] {
    std::ostringstream os;
    pairing_sweep(s.spec, s.model, s.base, {0.4, 0.2, 0.1, 0.05}, s.cutoff).write_csv(os);
    return os.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(TailMass, SpecExamples) {
  std::vector<double> hs = {0.2, 0.1, 0.05, 0.025};
  std::vector<core::ResidualSample> table;
  for (double h : hs) table.push_back({h, h * h});  // c(h) = h^{1/2} at δ = 1/2
  const auto q = PotentialModel::degenerate_quartic();
  const auto rows = tail_mass_diagnostic(quasimodes::make_case1_spec(q, 0.0, 3), q, hs, 0.5, table);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.c, std::sqrt(r.h), 1e-15);
    // On hr < 2 the argument log(hr)/log c⁻¹ stays below 1/2, where j vanishes, once h ≤ 1/16.
    if (r.h <= 1.0 / 16.0) EXPECT_EQ(r.j_norm, 0.0);
    EXPECT_LE(r.j_norm, r.j_tilde_norm);
  }
  // At h = 0.2 the argument reaches log 2/log √5 ≈ 0.86: compare with a direct quadrature.
  {
    const double h = 0.2;
    const auto spec = quasimodes::make_case1_spec(q, 0.0, 3);
    const auto u = quasimodes::build_quasimode_factors(spec, h, quasimodes::quasimode_grid(spec, h));
    double acc = 0.0;
    for (int i = 0; i < u.grid.n_r; ++i) {
      const double x = std::log(h * u.grid.r(i)) / std::log(1.0 / std::sqrt(h));
      acc += std::norm(u.radial[i]) * std::pow(core::j_step(x), 2) * u.grid.r(i) * u.grid.dr();
    }
    EXPECT_NEAR(rows.front().j_norm, std::sqrt(acc), 1e-12);
    EXPECT_GT(rows.front().j_norm, 0.0);
  }
  const auto c = PotentialModel::cosine();
  const auto rows2 = tail_mass_diagnostic(quasimodes::make_case2_spec(c, 0.0, 0, 1.04), c, hs, 0.5, table);
  for (const auto& r : rows2) {
    EXPECT_NEAR(r.j_norm, 1.0, 1e-10);
    EXPECT_NEAR(r.j_tilde_norm, 1.0, 1e-10);
  }
  quasimodes::SeparableField zero;
  zero.grid.n_r = 16;
  zero.grid.n_theta = 8;
  zero.h = 0.1;
  zero.radial.assign(16, 0.0);
  zero.angular.assign(8, 0.0);
  const auto [a, b] = tail_masses(zero, 0.3);
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
  std::ostringstream os;
  write_tail_mass_csv(os, rows);
  EXPECT_EQ(os.str().rfind("h,c,residual_norm,J_norm,J_tilde_norm\n", 0), 0u);
}
