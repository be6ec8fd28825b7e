#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "semilab/core/errors.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/quasimodes/quasimode.hpp"

using namespace semilab;
using namespace semilab::quasimodes;
using core::PotentialModel;
constexpr double kPi = std::numbers::pi;

namespace {

PotentialModel one_minus_cos() { return PotentialModel({{0, 1.0, 0.0}, {1, -1.0, 0.0}}); }

PolarGrid grid(double r_min, double r_max, int n_r, int n_theta) {
  PolarGrid g;
  g.r_min = r_min;
  g.r_max = r_max;
  g.n_r = n_r;
  g.n_theta = n_theta;
  return g;
}

double max_abs_diff(const PolarField& a, const PolarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

}  // namespace

TEST(Ell, Examples) {
  EXPECT_DOUBLE_EQ(ell(0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(ell(1), 2.0);
  EXPECT_DOUBLE_EQ(ell(3), 4.0);
  EXPECT_THROW(ell(-1), std::invalid_argument);
}

TEST(Spec, CaseInvariants) {
  const auto quartic = PotentialModel::degenerate_quartic();
  EXPECT_NO_THROW(make_case1_spec(quartic, 0.0, 3).validate(quartic));
  // θ = 1 is not critical for the quartic
  EXPECT_THROW(make_case1_spec(quartic, 1.0, 1).validate(quartic), std::invalid_argument);
  const auto cosv = PotentialModel::cosine();
  EXPECT_NO_THROW(make_case2_spec(cosv, 0.0, 1, 1.5).validate(cosv));
  EXPECT_THROW(make_case2_spec(cosv, 0.0, 1, 0.9).validate(cosv), std::invalid_argument);
  auto bad = make_case1_spec(cosv, 0.0, 1);
  bad.energy = 0.5;  // breaks V(θ0) = E
  EXPECT_THROW(bad.validate(cosv), std::invalid_argument);
}

TEST(RadialProfile, SupportScalesWithH) {
  const auto quartic = PotentialModel::degenerate_quartic();
  const auto spec = make_case1_spec(quartic, 0.0, 2);
  const auto g = grid(5.0, 25.0, 4001, 64);
  const auto f = radial_profile(spec, 0.1, g);
  for (int i = 0; i < g.n_r; ++i)
    if (g.r(i) <= 10.0 || g.r(i) >= 20.0) EXPECT_EQ(std::abs(f[i]), 0.0) << g.r(i);
  EXPECT_NEAR(radial_norm_squared(g, f), 1.0, 1e-10);
}

TEST(RadialProfile, KZeroUsesThreeHalvesScaling) {
  const auto cosv = PotentialModel::cosine();
  const auto spec = make_case1_spec(cosv, 0.0, 0);
  const auto g = grid(100.0, 300.0, 2001, 64);
  const auto f = radial_profile(spec, 0.04, g);
  const double lo = std::pow(0.04, -1.5);
  EXPECT_NEAR(lo, 125.0, 1e-9);
  bool touched = false;
  for (int i = 0; i < g.n_r; ++i) {
    if (g.r(i) <= 125.0 || g.r(i) >= 250.0) EXPECT_EQ(std::abs(f[i]), 0.0);
    touched |= std::abs(f[i]) > 0.0;
  }
  EXPECT_TRUE(touched);
}

TEST(RadialProfile, CaseTwoPhaseAndResolution) {
  const auto cosv = PotentialModel::cosine();
  const auto spec = make_case2_spec(cosv, 0.0, 0, 2.0);  // E1 = 1
  const auto g = grid(100.0, 300.0, 4001, 64);
  const auto f = radial_profile(spec, 0.04, g);
  // The phase carried between neighbouring samples is √E1·dr.
  const int i = g.n_r / 2;
  ASSERT_GT(std::abs(f[i]), 0.0);
  EXPECT_NEAR(std::arg(f[i + 1] / f[i]), g.dr(), 1e-9);
  // dr = 1 leaves about 6 points per wavelength 2π
  EXPECT_THROW(radial_profile(spec, 0.04, grid(100.0, 300.0, 201, 64)), ResolutionError);
}

TEST(RadialProfile, RejectsTooFewPointsAcrossBump) {
  const auto quartic = PotentialModel::degenerate_quartic();
  const auto spec = make_case1_spec(quartic, 0.0, 3);
  EXPECT_THROW(radial_profile(spec, 0.1, grid(5.0, 25.0, 40, 64)), ResolutionError);
}

TEST(AngularProfile, PeakSupportAndWidth) {
  const auto cosv = PotentialModel::cosine();
  auto spec = make_case1_spec(cosv, 0.0, 1, 0.1);
  const double w = angular_half_width(spec, 0.01);
  EXPECT_NEAR(w, std::pow(10.0, -1.1), 1e-12);  // 0.01^0.55
  EXPECT_NEAR(w, 0.0794, 5e-5);
  spec.theta0 = 2.0;
  const auto g = grid(1.0, 2.0, 16, 4096);
  const auto a = angular_profile(spec, 0.01, g);
  double peak = 0.0;
  for (int j = 0; j < g.n_theta; ++j) {
    peak = std::max(peak, a[j].real());
    if (core::circle_distance(g.theta(j), 2.0) >= w) EXPECT_EQ(a[j], cplx(0.0));
  }
  // φ ≡ 1 near θ0, so the value there is the normalization constant
  const int j0 = static_cast<int>(std::lround(2.0 / g.dtheta()));
  EXPECT_GT(a[j0].real(), 0.0);
  EXPECT_DOUBLE_EQ(a[j0].real(), peak);
  EXPECT_NEAR(angular_norm_squared(g, a), 1.0, 1e-12);
}

TEST(AngularProfile, UnderResolutionNamesRequiredGrid) {
  const auto cosv = PotentialModel::cosine();
  const auto spec = make_case1_spec(cosv, 0.0, 1, 0.1);
  try {
    angular_profile(spec, 0.01, grid(1.0, 2.0, 16, 256));
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_NE(std::string(e.what()).find("N_theta >= 2048"), std::string::npos) << e.what();
  }
}

TEST(BuildQuasimode, NormTensorAndConditionThree) {
  const auto quartic = PotentialModel::degenerate_quartic();
  const auto spec = make_case1_spec(quartic, 0.0, 3);
  for (double h : {0.2, 0.1, 0.05}) {
    const auto g = quasimode_grid(spec, h);
    const auto fac = build_quasimode_factors(spec, h, g);
    const auto u = build_quasimode(spec, h, g);
    EXPECT_NEAR(u.norm(), 1.0, 1e-8);
    double tensor = 0.0, cond3 = 0.0, outer = 0.0;
    for (int i = 0; i < g.n_r; ++i) {
      const double jr = core::j_step(h * g.r(i));
      for (int j = 0; j < g.n_theta; ++j) {
        tensor = std::max(tensor, std::abs(u.at(i, j) - fac.radial[i] * fac.angular[j]));
        cond3 = std::max(cond3, std::abs(jr * u.at(i, j) - u.at(i, j)));
        if (i >= 0.95 * g.n_r) outer = std::max(outer, std::abs(u.at(i, j)));
      }
    }
    EXPECT_EQ(tensor, 0.0);
    EXPECT_LE(cond3, 1e-12);
    EXPECT_EQ(outer, 0.0);
  }
}

TEST(ApplyPMinusE, GaussianRadialOracle) {
  const auto zero = PotentialModel::zero();
  const auto g = grid(2.0, 18.0, 801, 16);
  const double r0 = 10.0, sig = 1.0;
  std::vector<cplx> rad(g.n_r), ang(g.n_theta, cplx(1.0));
  for (int i = 0; i < g.n_r; ++i) rad[i] = std::exp(-std::pow(g.r(i) - r0, 2) / (2 * sig * sig));
  const auto u = PolarField::outer_product(g, 0.1, rad, ang);
  const auto out = apply_P_minus_E(u, zero, 0.0);
  double err = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.r(i), x = r - r0;
    const double gval = std::exp(-x * x / (2 * sig * sig));
    const double d1 = -x / (sig * sig) * gval, d2 = (x * x / std::pow(sig, 4) - 1.0 / (sig * sig)) * gval;
    for (int j = 0; j < g.n_theta; ++j) err = std::max(err, std::abs(out.at(i, j) - cplx(-(d2 + d1 / r))));
  }
  EXPECT_LE(err, 1e-9);
}

TEST(ApplyPMinusE, AngularModeAndMultiplication) {
  const auto zero = PotentialModel::zero();
  const auto cosv = PotentialModel::cosine();
  const auto g = grid(2.0, 18.0, 401, 32);
  std::vector<cplx> rad(g.n_r), flat(g.n_theta, cplx(1.0)), mode(g.n_theta);
  for (int i = 0; i < g.n_r; ++i) rad[i] = std::exp(-std::pow(g.r(i) - 10.0, 2) / 2.0);
  const int m = 3;
  for (int j = 0; j < g.n_theta; ++j) mode[j] = std::polar(1.0, m * g.theta(j));
  const auto base = apply_P_minus_E(PolarField::outer_product(g, 0.1, rad, flat), zero, 0.0);
  const auto u = PolarField::outer_product(g, 0.1, rad, mode);
  const auto out = apply_P_minus_E(u, zero, 0.0);
  const auto out_v = apply_P_minus_E(PolarField::outer_product(g, 0.1, rad, flat), cosv, 0.3);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.n_theta; ++j) {
      const cplx expect = base.at(i, 0) * mode[j] + (m * m / (r * r)) * u.at(i, j);
      e1 = std::max(e1, std::abs(out.at(i, j) - expect));
      e2 = std::max(e2, std::abs(out_v.at(i, j) - base.at(i, j) - (std::cos(g.theta(j)) - 0.3) * rad[i]));
    }
  }
  EXPECT_LE(e1, 1e-12);
  EXPECT_LE(e2, 1e-14);
}

TEST(ApplyPMinusE, Symmetric) {
  const auto cosv = PotentialModel::cosine();
  const auto g = grid(2.0, 18.0, 801, 64);
  std::vector<cplx> ra(g.n_r), rb(g.n_r), aa(g.n_theta), ab(g.n_theta);
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.r(i);
    ra[i] = std::exp(-std::pow(r - 9.0, 2) / 2.0) * std::polar(1.0, 0.7 * r);
    rb[i] = std::exp(-std::pow(r - 11.0, 2) / 3.0);
  }
  for (int j = 0; j < g.n_theta; ++j) {
    const double t = g.theta(j);
    aa[j] = std::exp(std::cos(t)) * std::polar(1.0, std::sin(2 * t));
    ab[j] = cplx(1.0 + 0.5 * std::sin(t), 0.2 * std::cos(3 * t));
  }
  const auto u = PolarField::outer_product(g, 0.1, ra, aa), v = PolarField::outer_product(g, 0.1, rb, ab);
  const cplx lhs = v.inner(apply_P_minus_E(u, cosv, 0.4));
  const cplx rhs = std::conj(u.inner(apply_P_minus_E(v, cosv, 0.4)));
  EXPECT_LE(std::abs(lhs - rhs), 1e-8) << lhs << " vs " << rhs;
}

TEST(ApplyPMinusE, DetectsAliasing) {
  const auto zero = PotentialModel::zero();
  const auto g = grid(2.0, 18.0, 64, 64);
  std::mt19937 gen(3);
  std::normal_distribution<double> n;
  PolarField u(g, 0.1);
  for (auto& z : u.samples()) z = cplx(n(gen), n(gen));
  EXPECT_THROW(apply_P_minus_E(u, zero, 0.0), AliasingError);
}

TEST(SupportReport, Examples) {
  const auto cosv = PotentialModel::cosine();
  const auto spec = make_case1_spec(cosv, 0.0, 1);
  const auto g = quasimode_grid(spec, 0.05);
  const auto u = build_quasimode_factors(spec, 0.05, g);
  EXPECT_TRUE(support_report(u, 0.0, kPi, 0.0).contained);

  // Angular mass near dist 0.1 from θ0 against a collar of width ≈ 0.01
  const auto g2 = grid(20.0, 40.0, 64, 1024);
  std::vector<cplx> rad(g2.n_r, cplx(1.0)), ang(g2.n_theta, cplx(0.0));
  for (int j = 0; j < g2.n_theta; ++j)
    if (std::abs(core::circle_distance(g2.theta(j), 0.0) - 0.1) < 0.01) ang[j] = 1.0;
  const auto rep = support_report(PolarField::outer_product(g2, 0.05, rad, ang), 0.0, 0.3, 1.0);
  EXPECT_FALSE(rep.contained);
  EXPECT_NEAR(rep.mass_outside, 1.0, 1e-12);
}

TEST(SupportReport, ShippedQuarticHoldsAtConstructedWidth) {
  const auto quartic = PotentialModel::degenerate_quartic();
  const auto spec = make_case1_spec(quartic, 0.0, 3);
  const double h = 0.05;
  const double w = angular_half_width(spec, h);
  // dist < w everywhere on supp (r ≤ 2/h), so C = w·(2/h)^p with p the exponent of w in h
  const double p = (1.0 + 3 * spec.epsilon_exp) / 4.0;
  const double C = w * std::pow(2.0 / h, p);
  const auto u = build_quasimode_factors(spec, h, quasimode_grid(spec, h));
  EXPECT_TRUE(support_report(u, 0.0, C, p).contained);
  // the faster r^{-ℓ(k)} collar does not contain it
  EXPECT_FALSE(support_report(u, 0.0, 1.0, ell(3)).contained);
}

TEST(ResidualScaling, RejectsBadHLists) {
  const auto quartic = PotentialModel::degenerate_quartic();
  const auto spec = make_case1_spec(quartic, 0.0, 3);
  EXPECT_THROW(residual_scaling(spec, quartic, {0.2, 0.1, 0.05}), std::invalid_argument);
  EXPECT_THROW(residual_scaling(spec, quartic, {0.2, 0.1, 0.05, 0.03}), std::invalid_argument);
}

TEST(ResidualScaling, QuarticKThreeIsLittleO) {
  const auto quartic = PotentialModel::degenerate_quartic();
  const auto spec = make_case1_spec(quartic, 0.0, 3);
  const auto t = residual_scaling(spec, quartic, {0.2, 0.1, 0.05, 0.025});
  EXPECT_GE(t.slope, 1.2);
  EXPECT_LE(t.max_oracle_discrepancy, 1e-4);
  std::ostringstream os;
  write_residual_csv(os, t);
  EXPECT_EQ(os.str().substr(0, 29), "h,residual_norm,slope_so_far\n");
}

TEST(ResidualScaling, KOneIsBigO) {
  const auto v = one_minus_cos();
  const auto spec = make_case1_spec(v, 0.0, 1);
  const auto t = residual_scaling(spec, v, {0.2, 0.1, 0.05, 0.025});
  EXPECT_GE(t.slope, 0.85);
  EXPECT_LE(t.slope, 1.05);
  EXPECT_LE(t.max_oracle_discrepancy, 1e-4);
}

TEST(ResidualScaling, CaseTwo) {
  const auto v = one_minus_cos();
  const auto spec = make_case2_spec(v, 0.0, 1, 2.5);
  const auto t = residual_scaling(spec, v, {0.2, 0.1, 0.05, 0.025});
  EXPECT_GE(t.slope, 0.85);
  EXPECT_LE(t.max_oracle_discrepancy, 1e-4);
}
