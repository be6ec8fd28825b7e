#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "semilab/core/cutoff.hpp"
#include "semilab/core/potential.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/core/symbol.hpp"

using namespace semilab::core;
constexpr double kPi = std::numbers::pi;

namespace {

// Central differences of a scalar function, used as an independent derivative oracle.
double fd_derivative(const std::function<double(double)>& f, double x, int order, double step) {
  if (order == 0) return f(x);
  auto g = [&](double y) { return fd_derivative(f, y, order - 1, step); };
  return (g(x + step) - g(x - step)) / (2.0 * step);
}

PotentialModel cosine_with_short_range() {
  return PotentialModel({{1, 1.0, 0.0}}, ShortRange{1.0, 2.0, 1.0});
}

}  // namespace

TEST(Potential, EvalExamples) {
  const auto cosv = PotentialModel::cosine();
  EXPECT_DOUBLE_EQ(eval_potential(cosv, 5.0, 0.0), 1.0);
  EXPECT_NEAR(eval_potential(cosv, 5.0, kPi / 2), 0.0, 1e-15);
  EXPECT_NEAR(eval_potential(cosine_with_short_range(), 3.0, 0.0), 1.0625, 1e-15);
}

TEST(Potential, ValueIndependentOfRadiusWithoutShortRange) {
  const auto v = PotentialModel::degenerate_quartic();
  for (double theta : {0.1, 1.3, 4.0})
    EXPECT_EQ(eval_potential(v, 2.0, theta), eval_potential(v, 200.0, theta));
}

TEST(Potential, RejectsSlowDecay) {
  EXPECT_THROW(PotentialModel({{1, 1.0, 0.0}}, ShortRange{1.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(PotentialModel({{-1, 1.0, 0.0}}), std::invalid_argument);
}

TEST(Potential, DerivativeExamples) {
  auto d = potential_derivatives(PotentialModel::cosine(), 0.0, 2);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[0], 0.0, 1e-15);
  EXPECT_NEAR(d[1], -1.0, 1e-15);

  d = potential_derivatives(PotentialModel({{1, 0.0, 1.0}}), 0.0, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0], 1.0, 1e-15);

  EXPECT_THROW(potential_derivatives(PotentialModel::cosine(), 0.0, 9), std::invalid_argument);
}

TEST(Potential, QuarticDerivativesMatchFiniteDifferenceOracle) {
  const auto v = PotentialModel::degenerate_quartic();
  // Closed form (1 - cos θ)² evaluated directly, independent of the Fourier expansion.
  auto direct = [](double t) { return std::pow(1.0 - std::cos(t), 2); };
  const auto d = potential_derivatives(v, 0.0, 4);
  for (int m = 1; m <= 4; ++m) {
    const double oracle = fd_derivative(direct, 0.0, m, 0.02);
    EXPECT_NEAR(d[m - 1], oracle, 2e-3 * (1 + std::abs(oracle))) << "order " << m;
  }
  EXPECT_NEAR(d[0], 0.0, 1e-14);
  EXPECT_NEAR(d[1], 0.0, 1e-14);
  EXPECT_NEAR(d[2], 0.0, 1e-14);
  EXPECT_NEAR(d[3], 6.0, 1e-13);
}

TEST(Potential, DerivativesMatchOracleAtRandomAngles) {
  const PotentialModel v({{1, 0.7, -0.2}, {2, 0.1, 0.3}, {3, -0.05, 0.02}});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int trial = 0; trial < 10; ++trial) {
    const double t = angle(rng);
    const auto d = potential_derivatives(v, t, 3);
    for (int m = 1; m <= 3; ++m) {
      auto f = [&](double x) { return v.v_inf(x); };
      EXPECT_NEAR(d[m - 1], fd_derivative(f, t, m, 1e-2), 1e-3 * (1 + std::abs(d[m - 1])));
    }
  }
}

TEST(CriticalPoints, Cosine) {
  const auto set = find_critical_points(PotentialModel::cosine(), 1e-10);
  EXPECT_FALSE(set.degenerate);
  ASSERT_EQ(set.points.size(), 2u);
  EXPECT_NEAR(set.points[0].theta0, 0.0, 1e-10);
  EXPECT_EQ(set.points[0].order, 1);
  EXPECT_NEAR(set.points[0].value, 1.0, 1e-12);
  EXPECT_NEAR(set.points[1].theta0, kPi, 1e-10);
  EXPECT_EQ(set.points[1].order, 1);
  EXPECT_NEAR(set.points[1].value, -1.0, 1e-12);
}

TEST(CriticalPoints, DegenerateQuartic) {
  const auto set = find_critical_points(PotentialModel::degenerate_quartic(), 1e-10);
  bool found = false;
  for (const auto& p : set.points) {
    if (circle_distance(p.theta0, 0.0) < 1e-6) {
      found = true;
      EXPECT_EQ(p.order, 3);
      EXPECT_NEAR(p.value, 0.0, 1e-12);
    }
  }
  EXPECT_TRUE(found);
}

TEST(CriticalPoints, ConstantIsDegenerate) {
  EXPECT_TRUE(find_critical_points(PotentialModel::zero(), 1e-10).degenerate);
  EXPECT_TRUE(find_critical_points(PotentialModel({{0, 2.0, 0.0}}), 1e-10).degenerate);
  EXPECT_THROW(find_critical_points(PotentialModel::cosine(), 0.0), std::invalid_argument);
}

TEST(CriticalPoints, OrderAgreesWithDerivativeOracle) {
  const std::vector<PotentialModel> shipped = {PotentialModel::cosine(), PotentialModel::degenerate_quartic(),
                                               PotentialModel({{1, 1.0, 0.0}, {2, 0.0, 0.5}}),
                                               PotentialModel({{3, 1.0, 0.0}})};
  for (const auto& v : shipped) {
    const auto set = find_critical_points(v, 1e-9);
    ASSERT_FALSE(set.points.empty());
    for (const auto& p : set.points) {
      const auto d = potential_derivatives(v, p.theta0, 8);
      int k = 0;
      while (k < 8 && std::abs(d[k]) <= 1e-6) ++k;
      EXPECT_EQ(p.order, k) << "theta0 = " << p.theta0;
      EXPECT_NEAR(p.value, v.v_inf(p.theta0), 1e-14);
    }
  }
}

TEST(Cutoff, ShortScaleExamples) {
  const auto j = make_cutoff(CutoffKind::JStep);
  EXPECT_EQ(j.evaluate(0.1, 0.4), 0.0);
  EXPECT_EQ(j.evaluate(0.01, 2.0), 1.0);
  EXPECT_THROW(make_cutoff(CutoffKind::JStep, CutoffParams{-1.0}), std::invalid_argument);
  EXPECT_THROW(make_cutoff(CutoffKind::JStep, CutoffParams{0.0}), std::invalid_argument);
  EXPECT_THROW(make_cutoff(CutoffKind::JLog), std::invalid_argument);
}

TEST(Cutoff, LogScaleExample) {
  // c(h) = 0.1 at h = 0.01 for ‖R_h‖ = h², δ = 1/2.
  LogScaleParams log_params{0.5, {{0.01, 1e-4}, {0.005, 2.5e-5}}};
  const auto J = make_cutoff(CutoffKind::JLog, CutoffParams{std::nullopt, log_params});
  EXPECT_NEAR(c_of_h(log_params.residual_table, 0.5, 0.01), 0.1, 1e-15);
  EXPECT_EQ(J.evaluate(0.01, 1.0), 0.0);
  EXPECT_EQ(J.evaluate(0.01, 1e6), 1.0);
}

TEST(Cutoff, COfHExamples) {
  std::vector<ResidualSample> table;
  for (double h = 0.001; h <= 0.1; h *= 1.5) table.push_back({h, h * h});
  table.push_back({0.01, 1e-4});
  table.push_back({0.04, 0.04 * 0.04});
  EXPECT_NEAR(c_of_h(table, 0.5, 0.01), 0.1, 1e-12);
  EXPECT_NEAR(c_of_h(table, 0.5, 0.04), 0.2, 1e-12);

  std::vector<ResidualSample> spiky;
  for (double h : {0.05, 0.04, 0.03, 0.02, 0.01}) spiky.push_back({h, h * h});
  spiky.push_back({0.02, 0.5 * 0.02});  // c₀(0.02) = 0.5
  EXPECT_NEAR(c_of_h(spiky, 1.0, 0.05), 0.5, 1e-12);

  EXPECT_THROW(c_of_h({}, 0.5, 0.1), std::invalid_argument);
}

TEST(Cutoff, COfHIsMonotoneEnvelope) {
  std::vector<ResidualSample> table;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(0.5, 2.0);
  for (double h = 0.2; h > 1e-3; h *= 0.8) table.push_back({h, noise(rng) * h * h});
  double prev = 0.0;
  for (double h = 2e-3; h < 0.2; h *= 1.1) {
    const double c = c_of_h(table, 0.5, h);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

namespace {

std::vector<CutoffFamily> shipped_cutoffs() {
  LogScaleParams log_params{0.5, {}};
  for (double h = 0.4; h > 1e-3; h *= 0.5) log_params.residual_table.push_back({h, h * h});
  std::vector<CutoffFamily> out;
  out.push_back(make_cutoff(CutoffKind::JStep));
  out.push_back(make_cutoff(CutoffKind::JStep, CutoffParams{0.25}));
  out.push_back(make_cutoff(CutoffKind::JLog, CutoffParams{std::nullopt, log_params}));
  out.push_back(make_cutoff(CutoffKind::ChiLogWindow, CutoffParams{std::nullopt, log_params}));
  out.push_back(make_cutoff(CutoffKind::RWeighted));
  out.push_back(make_cutoff(CutoffKind::CustomSmooth));
  return out;
}

}  // namespace

TEST(Cutoff, VanishesBelowEpsilon) {
  for (const auto& f : shipped_cutoffs()) {
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
      for (int i = 0; i <= 200; ++i) {
        const double r = f.epsilon() * i / 200.0;
        EXPECT_EQ(f.evaluate(h, r), 0.0) << f.id() << " r=" << r;
      }
    }
  }
}

TEST(Cutoff, DerivativeBoundsUniformInH) {
  // Sampled max |∂_r^m f_h| for m ≤ 4 must not grow as h decreases.
  for (const auto& f : shipped_cutoffs()) {
    for (int m = 1; m <= 4; ++m) {
      std::vector<double> maxima;
      for (double h : {0.2, 0.1, 0.05, 0.025}) {
        double mx = 0.0;
        auto g = [&](double r) { return f.evaluate(h, r); };
        for (double r = f.epsilon() + 0.05; r < 12.0; r += 0.01) mx = std::max(mx, std::abs(fd_derivative(g, r, m, 0.01)));
        maxima.push_back(mx);
      }
      for (std::size_t i = 1; i < maxima.size(); ++i)
        EXPECT_LE(maxima[i], 1.05 * maxima[0] + 1e-9) << f.id() << " order " << m;
    }
  }
}

TEST(Cutoff, KindNames) {
  for (auto k : {CutoffKind::JStep, CutoffKind::JLog, CutoffKind::ChiLogWindow, CutoffKind::RWeighted,
                 CutoffKind::CustomSmooth})
    EXPECT_EQ(cutoff_kind_from_string(to_string(k)), k);
  EXPECT_THROW(cutoff_kind_from_string("j_step"), std::invalid_argument);
}

TEST(Symbol, BumpExamples) {
  const double t0 = 0.7;
  const auto a = SymbolSpec::bump3(0.0, t0, 0.0, 0.3);
  EXPECT_DOUBLE_EQ(eval_symbol(a, 0.0, t0, 0.0), 1.0);
  EXPECT_EQ(eval_symbol(a, 2.0, t0, 0.0), 0.0);
  const auto b = SymbolSpec::bump(SymbolVar::Rho, 0.0, 1.0) * SymbolSpec::bump(SymbolVar::W, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(eval_symbol(b, 0.0, 3.0, 0.0), 1.0);
}

TEST(Symbol, ThetaBumpIsCircular) {
  const auto a = SymbolSpec::bump(SymbolVar::Theta, 0.0, 0.3);
  EXPECT_NEAR(a(0.0, kTwoPi - 0.1, 0.0), a(0.0, 0.1, 0.0), 1e-14);
  EXPECT_GT(a(0.0, -0.1, 0.0), 0.0);
  EXPECT_TRUE(a.theta_may_be_nonzero(kTwoPi - 0.2));
  EXPECT_FALSE(a.theta_may_be_nonzero(1.0));
}

TEST(Symbol, SupportDeclarationIsHonest) {
  const std::vector<SymbolSpec> symbols = {
      SymbolSpec::bump3(0.0, 0.5, 0.0, 0.3),
      SymbolSpec::plateau3(1.0, 6.0, -0.5, 0.2, 0.4),
      SymbolSpec::bump3(0.0, 0.0, 0.0, 0.3) + SymbolSpec::bump3(0.5, 3.0, 0.2, 0.2),
      SymbolSpec::bump3(0.2, 2.0, 0.1, 0.3) * SymbolSpec::shell_factor(PotentialModel::cosine(), 0.5),
      SymbolSpec::bump3(0.0, 0.0, 0.0, 0.5).scaled(-2.0)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0), angle(0.0, kTwoPi);
  for (const auto& a : symbols) {
    const SupportBox box = a.support_box();
    for (int i = 0; i < 20000; ++i) {
      const double r = u(rng), t = angle(rng), w = u(rng);
      if (!box.contains(r, t, w)) EXPECT_EQ(a(r, t, w), 0.0);
    }
  }
  for (const auto& a : symbols) EXPECT_FALSE(a.is_zero());
  EXPECT_TRUE(SymbolSpec::constant(0.0).is_zero());
}

TEST(Symbol, PositiveAtCenterAndSmooth) {
  const auto a = SymbolSpec::plateau3(0.3, 1.0, -0.2, 0.1, 0.4);
  EXPECT_GT(a(0.3, 1.0, -0.2), 0.0);
  // Second finite differences stay bounded along a line through the box.
  double mx = 0.0;
  for (double s = -0.5; s <= 0.5; s += 0.001) {
    auto f = [&](double x) { return a(0.3 + x, 1.0 + x, -0.2 + x); };
    mx = std::max(mx, std::abs(fd_derivative(f, s, 2, 1e-3)));
  }
  EXPECT_LT(mx, 1e3);
}

TEST(Smooth, JStepPlateaus) {
  EXPECT_EQ(j_step(0.5), 0.0);
  EXPECT_EQ(j_step(1.0), 1.0);
  for (double r = 0.5; r < 1.0; r += 0.01) {
    EXPECT_GE(j_step(r + 0.01), j_step(r));
  }
  EXPECT_NEAR(circle_distance(0.1, kTwoPi - 0.1), 0.2, 1e-14);
}
