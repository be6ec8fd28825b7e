#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "semilab/core/smooth.hpp"
#include "semilab/flow/induced_flow.hpp"

using namespace semilab;
using namespace semilab::flow;
using core::PotentialModel;
constexpr double kPi = std::numbers::pi;

namespace {

// Independent oracle for the induced field: numerically differentiate the full
// Hamiltonian ρ̃² + η̃²/r² + V∞(θ) and pull Hamilton's equations back to τ with
// η = η̃/r and dτ = dt/r.
Tangent hamiltonian_oracle(const PhasePoint& p, const PotentialModel& v) {
  const double r = 1.7;  // any radius works: the induced field is r-independent
  auto H = [&](double rr, double rho, double th, double et) { return rho * rho + et * et / (rr * rr) + v.v_inf(th); };
  const double et = r * p.eta, d = 1e-5;
  const double dH_dr = (H(r + d, p.rho, p.theta, et) - H(r - d, p.rho, p.theta, et)) / (2 * d);
  const double dH_drho = (H(r, p.rho + d, p.theta, et) - H(r, p.rho - d, p.theta, et)) / (2 * d);
  const double dH_dth = (H(r, p.rho, p.theta + d, et) - H(r, p.rho, p.theta - d, et)) / (2 * d);
  const double dH_det = (H(r, p.rho, p.theta, et + d) - H(r, p.rho, p.theta, et - d)) / (2 * d);
  const double r_dot = dH_drho, rho_dot = -dH_dr, th_dot = dH_det, et_dot = -dH_dth;
  const double eta_dot = et_dot / r - et * r_dot / (r * r);
  return {r * rho_dot, r * th_dot, r * eta_dot};
}

}  // namespace

TEST(FlowRhs, Examples) {
  const auto cosv = PotentialModel::cosine();
  const Tangent fixed = flow_rhs({0.0, 0.0, 0.0}, cosv);
  EXPECT_EQ(fixed.norm(), 0.0);

  const Tangent a = flow_rhs({0.0, kPi / 2, 1.0}, cosv);
  EXPECT_NEAR(a.rho, 2.0, 1e-15);
  EXPECT_NEAR(a.theta, 2.0, 1e-15);
  EXPECT_NEAR(a.eta, 1.0, 1e-15);

  const Tangent b = flow_rhs({1.0, 0.0, 1.0}, PotentialModel::zero());
  EXPECT_DOUBLE_EQ(b.rho, 2.0);
  EXPECT_DOUBLE_EQ(b.theta, 2.0);
  EXPECT_DOUBLE_EQ(b.eta, -2.0);
}

TEST(FlowRhs, MatchesHamiltonianOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5), angle(0.0, core::kTwoPi);
  for (const auto& v : {PotentialModel::cosine(), PotentialModel::degenerate_quartic()}) {
    for (int i = 0; i < 20; ++i) {
      const PhasePoint p{u(rng), angle(rng), u(rng)};
      const Tangent got = flow_rhs(p, v), want = hamiltonian_oracle(p, v);
      EXPECT_NEAR(got.rho, want.rho, 1e-7);
      EXPECT_NEAR(got.theta, want.theta, 1e-7);
      EXPECT_NEAR(got.eta, want.eta, 1e-7);
    }
  }
}

TEST(IntegrateFlow, FixedPointIsConstant) {
  const auto traj = integrate_flow({0.3, kPi, 0.0}, PotentialModel::cosine(), 10.0, 1e-10);
  EXPECT_TRUE(traj.fixed_point);
  for (const auto& p : traj.states) {
    EXPECT_EQ(p.rho, 0.3);
    EXPECT_EQ(p.theta, kPi);
    EXPECT_EQ(p.eta, 0.0);
  }
  EXPECT_EQ(check_energy_conservation(traj), 0.0);
  const auto rep = asymptotic_diagnostics(traj, PotentialModel::cosine());
  EXPECT_EQ(rep.rho_limit, 0.3);
  EXPECT_EQ(rep.tail_max_eta, 0.0);
  EXPECT_NEAR(rep.tail_max_dV, 0.0, 1e-15);
}

TEST(IntegrateFlow, RejectsBadArguments) {
  EXPECT_THROW(integrate_flow({0, 0, 1}, PotentialModel::cosine(), 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(integrate_flow({0, 0, 1}, PotentialModel::cosine(), 0.0, 1e-8), std::invalid_argument);
}

TEST(IntegrateFlow, FreeClosedForm) {
  const double theta0 = 1.0;
  const auto traj = integrate_flow({0.0, theta0, 1.0}, PotentialModel::zero(), 1.0, 1e-10);
  double err = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const auto& p = traj.states[i];
    err = std::max({err, std::abs(p.rho - std::tanh(2 * t)), std::abs(p.eta - 1.0 / std::cosh(2 * t)),
                    std::abs(p.theta - (theta0 + 2 * std::atan(std::tanh(t))))});
  }
  EXPECT_LT(err, 1e-8);
  EXPECT_LE(check_energy_conservation(traj), 1e-8);
}

TEST(IntegrateFlow, CosineDecaysAndMatchesTightOracle) {
  const auto cosv = PotentialModel::cosine();
  const PhasePoint p0{0.0, kPi / 2, 1.0};
  const auto traj = integrate_flow(p0, cosv, 50.0, 1e-10);
  const auto oracle = integrate_flow(p0, cosv, 50.0, 1e-13);
  const auto& end = traj.states.back();
  EXPECT_LT(std::abs(end.eta), 1e-3);
  EXPECT_LT(std::abs(cosv.v_inf_derivative(end.theta, 1)), 1e-3);
  for (std::size_t i = 0; i < traj.size(); i += 50) {
    EXPECT_NEAR(traj.states[i].rho, oracle.states[i].rho, 1e-7);
    EXPECT_NEAR(traj.states[i].theta, oracle.states[i].theta, 1e-7);
    EXPECT_NEAR(traj.states[i].eta, oracle.states[i].eta, 1e-7);
  }
  EXPECT_LE(check_energy_conservation(traj), 1e-8);

  const auto rep = asymptotic_diagnostics(traj, cosv);
  EXPECT_TRUE(rep.rho_monotone);
  EXPECT_NEAR(rep.rho_limit, std::sqrt(rep.energy - cosv.v_inf(rep.theta_limit)), 1e-4);
  EXPECT_LT(std::min(core::circle_distance(rep.theta_limit, 0.0), core::circle_distance(rep.theta_limit, kPi)), 1e-3);
}

TEST(IntegrateFlow, BackwardRunIsMonotoneInForwardTime) {
  const auto cosv = PotentialModel::cosine();
  const auto traj = integrate_flow({0.2, 1.0, 0.4}, cosv, -60.0, 1e-10);
  EXPECT_TRUE(traj.backward);
  EXPECT_DOUBLE_EQ(traj.times.front(), -60.0);
  EXPECT_DOUBLE_EQ(traj.times.back(), 0.0);
  for (std::size_t i = 1; i < traj.size(); ++i) EXPECT_GT(traj.times[i], traj.times[i - 1]);
  const auto last = traj.states.back();
  EXPECT_DOUBLE_EQ(last.rho, 0.2);
  EXPECT_DOUBLE_EQ(last.theta, 1.0);
  const auto rep = asymptotic_diagnostics(traj, cosv);
  EXPECT_TRUE(rep.rho_monotone);
  EXPECT_LT(rep.tail_max_eta, 1e-3);
  EXPECT_LE(check_energy_conservation(traj), 1e-8);
}

TEST(IntegrateFlow, RandomEnsembleProperties) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rho(0.5, 1.0), eta(-0.5, 0.5), angle(0.0, core::kTwoPi);
  for (const auto& v : {PotentialModel::cosine(), PotentialModel::degenerate_quartic()}) {
    for (int i = 0; i < 3; ++i) {
      const PhasePoint p0{rho(rng), angle(rng), eta(rng)};
      const auto traj = integrate_flow(p0, v, 200.0, 1e-10);
      EXPECT_LE(check_energy_conservation(traj), 100 * 1e-10);
      const auto rep = asymptotic_diagnostics(traj, v);
      EXPECT_TRUE(rep.rho_monotone);
      EXPECT_LT(rep.tail_max_eta, 1e-3);
      EXPECT_LT(rep.tail_max_dV, 1e-3);
      EXPECT_TRUE(rep.integrals_bounded);
    }
  }
}

TEST(IntegrateFlow, ShortTailRejected) {
  FlowOptions opt;
  opt.output_samples = 101;
  const auto traj = integrate_flow({0.0, 1.0, 0.5}, PotentialModel::cosine(), 5.0, 1e-10, opt);
  EXPECT_THROW(asymptotic_diagnostics(traj, PotentialModel::cosine()), std::invalid_argument);
}

TEST(LiftFullFlow, FreeRadialClosedForm) {
  const auto full = lift_full_flow(1.0, {1.0, 0.3, 0.0}, PotentialModel::zero(), 3.0);
  for (std::size_t i = 0; i < full.times.size(); ++i) {
    const double t = full.times[i];
    EXPECT_NEAR(full.radius[i], 1.0 + 2.0 * t, 1e-8);
    EXPECT_NEAR(full.tau[i], 0.5 * std::log(1.0 + 2.0 * t), 1e-8);
  }
  for (std::size_t i = 1; i < full.tau.size(); ++i) EXPECT_GT(full.tau[i], full.tau[i - 1]);
}

TEST(LiftFullFlow, PullbackMatchesInducedFlow) {
  const auto cosv = PotentialModel::cosine();
  const PhasePoint p0{0.1, 2.0, 0.3};
  LiftOptions opt;
  opt.stop_at_tau = 1.0;
  const auto full = lift_full_flow(1.5, p0, cosv, 1e6, opt);
  const auto induced = integrate_flow(p0, cosv, 1.0, 1e-10);
  const PhasePoint a = full.pullback_at_tau(1.0), b = induced.states.back();
  EXPECT_NEAR(a.rho, b.rho, 1e-6);
  EXPECT_NEAR(a.theta, b.theta, 1e-6);
  EXPECT_NEAR(a.eta, b.eta, 1e-6);
}

TEST(LiftFullFlow, CollapseReported) {
  EXPECT_THROW(lift_full_flow(1.0, {-1.0, 0.0, 0.0}, PotentialModel::zero(), 0.75), NumericalError);
  EXPECT_THROW(lift_full_flow(0.0, {1.0, 0.0, 0.0}, PotentialModel::zero(), 1.0), std::invalid_argument);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const auto traj = integrate_flow({0.0, 1.0, 0.5}, PotentialModel::cosine(), 2.0, 1e-10, FlowOptions{1e-10, 11});
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,rho,theta,eta,E,F,G,q_integral");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 11);
}
