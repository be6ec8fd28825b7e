#include "semilab/quasimodes/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "semilab/core/errors.hpp"
#include "semilab/core/format.hpp"
#include "semilab/core/parallel.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/quantization/fft.hpp"

namespace semilab::quasimodes {

using core::PotentialModel;

double ell(int k) {
  if (k < 0) throw std::invalid_argument("ell: k must be nonnegative");
  return k == 0 ? 2.0 / 3.0 : k + 1.0;
}

void QuasimodeSpec::validate(const PotentialModel& model, double tol) const {
  if (case_id != 1 && case_id != 2) throw std::invalid_argument("quasimode case must be 1 or 2");
  if (k < 0) throw std::invalid_argument("quasimode critical order k must be nonnegative");
  if (!(epsilon_exp > 0.0)) throw std::invalid_argument("quasimode epsilon_exp must be positive");
  if (!(support_constant > 0.0)) throw std::invalid_argument("quasimode support constant must be positive");
  if (!(radial_lo >= 1.0 && radial_hi > radial_lo))
    throw std::invalid_argument("radial bump needs 1 <= radial_lo < radial_hi");
  const double v0 = model.v_inf(theta0);
  if (std::abs(e2 - v0) > tol) throw std::invalid_argument("E2 must equal V(theta0)");
  if (std::abs(e1 + e2 - energy) > tol) throw std::invalid_argument("E must equal E1 + E2");
  if (k > 0 && core::critical_order(model, theta0, tol) < k)
    throw std::invalid_argument("theta0 is not a critical point of order >= k");
  if (case_id == 1) {
    if (std::abs(e1) > tol) throw std::invalid_argument("case 1 requires E1 = 0");
    if (energy < model.v_inf_min() - tol || energy > model.v_inf_max() + tol)
      throw std::invalid_argument("case 1 requires min V <= E <= max V");
  } else {
    if (!(energy > model.v_inf_max())) throw std::invalid_argument("case 2 requires E > max V");
    if (!(e1 > 0.0)) throw std::invalid_argument("case 2 requires E1 = E - V(theta0) > 0");
  }
}

QuasimodeSpec make_case1_spec(const PotentialModel& model, double theta0, int k, double epsilon_exp) {
  QuasimodeSpec s;
  s.case_id = 1;
  s.k = k;
  s.epsilon_exp = epsilon_exp;
  s.theta0 = theta0;
  s.e2 = model.v_inf(theta0);
  s.energy = s.e2;
  s.e1 = 0.0;
  return s;
}

QuasimodeSpec make_case2_spec(const PotentialModel& model, double theta0, int k, double energy, double epsilon_exp) {
  QuasimodeSpec s;
  s.case_id = 2;
  s.k = k;
  s.epsilon_exp = epsilon_exp;
  s.theta0 = theta0;
  s.energy = energy;
  s.e2 = model.v_inf(theta0);
  s.e1 = energy - s.e2;
  return s;
}

double radial_scale(const QuasimodeSpec& spec, double h) {
  return (spec.case_id == 1 && spec.k > 0) ? h : std::pow(h, 1.5);
}

double angular_half_width(const QuasimodeSpec& spec, double h) {
  return std::pow(h, (1.0 + spec.k * spec.epsilon_exp) / (spec.k + 1.0));
}

double angular_bump(double x) { return 1.0 - core::smooth_transition(2.0 * std::abs(x) - 1.0); }

std::vector<cplx> radial_profile(const QuasimodeSpec& spec, double h, const PolarGrid& grid) {
  grid.validate();
  const double s = radial_scale(spec, h);
  const double mid = 0.5 * (spec.radial_lo + spec.radial_hi), half = 0.5 * (spec.radial_hi - spec.radial_lo);
  int across = 0;
  std::vector<cplx> f(grid.n_r);
  const double k = spec.case_id == 2 ? std::sqrt(spec.e1) : 0.0;
  for (int i = 0; i < grid.n_r; ++i) {
    const double r = grid.r(i);
    const double t = (s * r - mid) / half;
    if (std::abs(t) < 1.0) ++across;
    const double amp = core::classic_bump(t);
    f[i] = amp * cplx(std::cos(k * r), std::sin(k * r));
  }
  if (across < 32)
    throw ResolutionError("radial_profile: only " + std::to_string(across) +
                          " grid points across the radial bump (need 32)");
  if (k > 0.0) {
    const double per_wavelength = 2.0 * std::numbers::pi / k / grid.dr();
    if (per_wavelength < 8.0)
      throw ResolutionError("radial_profile: " + core::fmt(per_wavelength) +
                            " points per wavelength of the radial phase (need 8)");
  }
  const double n = std::sqrt(radial_norm_squared(grid, f));
  if (!(n > 0.0)) throw ResolutionError("radial_profile: bump support misses the radial grid");
  for (auto& z : f) z /= n;
  return f;
}

std::vector<cplx> angular_profile(const QuasimodeSpec& spec, double h, const PolarGrid& grid) {
  grid.validate();
  const double w = angular_half_width(spec, h);
  const double per_half_width = w / grid.dtheta();
  if (per_half_width < 16.0) {
    int need = 8;
    while (need * w / (2.0 * std::numbers::pi) < 16.0) need *= 2;
    throw ResolutionError("angular_profile: " + core::fmt(per_half_width) +
                          " points across the half-width (need 16); use N_theta >= " + std::to_string(need));
  }
  std::vector<cplx> g(grid.n_theta);
  for (int j = 0; j < grid.n_theta; ++j) g[j] = angular_bump(core::circle_distance(grid.theta(j), spec.theta0) / w);
  const double n = std::sqrt(angular_norm_squared(grid, g));
  for (auto& z : g) z /= n;
  return g;
}

PolarGrid quasimode_grid(const QuasimodeSpec& spec, double h, const GridPolicy& policy) {
  const double s = radial_scale(spec, h);
  const double lo = spec.radial_lo / s, hi = spec.radial_hi / s;
  PolarGrid g;
  g.r_min = std::max(0.0, lo - 0.05 * (hi - lo));
  g.r_max = g.r_min + (hi - g.r_min) / 0.94;  // support ends before the outer 5%
  double dr = (hi - lo) / policy.radial_points_per_bump;
  if (spec.case_id == 2) dr = std::min(dr, 2.0 * std::numbers::pi / std::sqrt(spec.e1) / policy.points_per_wavelength);
  g.n_r = static_cast<int>(std::ceil((g.r_max - g.r_min) / dr)) + 1;
  const double w = angular_half_width(spec, h);
  int n = 64;
  while (n < policy.angular_points_per_half_width * 2.0 * std::numbers::pi / w && n < policy.max_angular_points) n *= 2;
  g.n_theta = n;
  // The policy density is a starting point; refine until the profile spectrum clears the
  // aliasing threshold with a decade to spare.
  while (g.n_theta < policy.max_angular_points && angular_spectral_tail(g, angular_profile(spec, h, g)) > 1e-11)
    g.n_theta *= 2;
  return g;
}

SeparableField build_quasimode_factors(const QuasimodeSpec& spec, double h, const PolarGrid& grid) {
  SeparableField u;
  u.grid = grid;
  u.h = h;
  u.radial = radial_profile(spec, h, grid);
  u.angular = angular_profile(spec, h, grid);
  return u;
}

PolarField build_quasimode(const QuasimodeSpec& spec, double h, const PolarGrid& grid) {
  return build_quasimode_factors(spec, h, grid).to_field();
}

namespace {

constexpr double kD1[9] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
constexpr double kD2[9] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};

// -(∂r² + r^{-1}∂r) applied to a strided radial line, zero beyond the ends.
template <typename Get>
cplx radial_operator(const PolarGrid& grid, int i, Get&& get) {
  const double dr = grid.dr();
  cplx d1(0.0, 0.0), d2(0.0, 0.0);
  for (int s = -4; s <= 4; ++s) {
    const int k = i + s;
    if (k < 0 || k >= grid.n_r) continue;
    const cplx v = get(k);
    d1 += kD1[s + 4] * v;
    d2 += kD2[s + 4] * v;
  }
  d1 /= dr;
  d2 /= dr * dr;
  const double r = grid.r(i);
  if (r == 0.0) return -d2;
  return -(d2 + d1 / r);
}

// -∂θ² of a periodic sample vector via FFT.
std::vector<cplx> minus_theta_second(const PolarGrid& grid, const std::vector<cplx>& g) {
  const int n = grid.n_theta;
  std::vector<cplx> c = g;
  const quantization::Fft fft({n});
  fft.forward(c.data());
  for (int m = 0; m < n; ++m) {
    const int fm = m < n / 2 ? m : m - n;
    // The Nyquist mode has no consistent real derivative; drop it.
    const double mult = (m == n / 2) ? 0.0 : static_cast<double>(fm) * fm;
    c[m] *= mult / n;
  }
  fft.backward(c.data());
  return c;
}

double spectral_tail(const std::vector<double>& power, int n) {
  double peak = 0.0, tail = 0.0;
  for (int m = 0; m < n; ++m) {
    const int fm = std::abs(m < n / 2 ? m : m - n);
    peak = std::max(peak, power[m]);
    if (fm >= static_cast<int>(0.95 * (n / 2))) tail = std::max(tail, power[m]);
  }
  return peak > 0.0 ? std::sqrt(tail / peak) : 0.0;
}

void check_aliasing(double tail) {
  if (tail > 1e-10)
    throw AliasingError("apply_P_minus_E: angular spectrum at Nyquist is " + core::fmt(tail) +
                        " of its peak (limit 1e-10); refine N_theta");
}

}  // namespace

double angular_spectral_tail(const PolarGrid& grid, const std::vector<cplx>& angular) {
  const int n = grid.n_theta;
  std::vector<cplx> c = angular;
  quantization::Fft({n}).forward(c.data());
  std::vector<double> power(n);
  for (int m = 0; m < n; ++m) power[m] = std::norm(c[m]);
  return spectral_tail(power, n);
}

double angular_spectral_tail(const PolarField& u) {
  const auto& g = u.grid();
  const int n = g.n_theta;
  const quantization::Fft fft({n});
  std::vector<double> power(n, 0.0);
  std::vector<cplx> row(n);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < n; ++j) row[j] = u.at(i, j);
    fft.forward(row.data());
    for (int m = 0; m < n; ++m) power[m] = std::max(power[m], std::norm(row[m]));
  }
  return spectral_tail(power, n);
}

PolarField apply_P_minus_E(const PolarField& u, const PotentialModel& model, double energy) {
  check_aliasing(angular_spectral_tail(u));
  const auto& g = u.grid();
  PolarField out(g, u.h());
  std::vector<double> v_inf(g.n_theta);
  for (int j = 0; j < g.n_theta; ++j) v_inf[j] = model.v_inf(g.theta(j));
  std::vector<cplx> row(g.n_theta);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_theta; ++j) row[j] = u.at(i, j);
    const auto ang = minus_theta_second(g, row);
    const double r = g.r(i);
    const double vs = model.v_short(r);
    for (int j = 0; j < g.n_theta; ++j) {
      const cplx radial = radial_operator(g, i, [&](int k) { return u.at(k, j); });
      const cplx angular = r > 0.0 ? ang[j] / (r * r) : cplx(0.0, 0.0);
      out.at(i, j) = radial + angular + (v_inf[j] + vs - energy) * u.at(i, j);
    }
  }
  return out;
}

double residual_norm(const SeparableField& u, const PotentialModel& model, double energy) {
  const auto& g = u.grid;
  check_aliasing(angular_spectral_tail(g, u.angular));
  const auto ang = minus_theta_second(g, u.angular);
  std::vector<double> v_inf(g.n_theta);
  for (int j = 0; j < g.n_theta; ++j) v_inf[j] = model.v_inf(g.theta(j));
  double total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.r(i);
    const cplx a = radial_operator(g, i, [&](int k) { return u.radial[k]; });
    const cplx fi = u.radial[i];
    const cplx b = r > 0.0 ? fi / (r * r) : cplx(0.0, 0.0);
    const double vs = model.v_short(r) - energy;
    if (a == cplx(0.0) && fi == cplx(0.0)) continue;
    double row = 0.0;
    for (int j = 0; j < g.n_theta; ++j) row += std::norm((a + (v_inf[j] + vs) * fi) * u.angular[j] + b * ang[j]);
    total += row * r;
  }
  return std::sqrt(total * g.dr() * g.dtheta());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= x.size(), my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("loglog_slope: degenerate abscissae");
  return sxy / sxx;
}

ResidualScaling residual_scaling(const QuasimodeSpec& spec, const PotentialModel& model,
                                 const std::vector<double>& h_list, const GridPolicy& policy, unsigned threads) {
  if (h_list.size() < 4) throw std::invalid_argument("residual_scaling: need at least 4 h values");
  const double ratio = h_list[1] / h_list[0];
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] > 0.0) || std::abs(h_list[i] / h_list[i - 1] - ratio) > 1e-6 * ratio)
      throw std::invalid_argument("residual_scaling: h values must be geometrically spaced");
  spec.validate(model);
  ResidualScaling out;
  out.rows.resize(h_list.size());
  GridPolicy fine = policy;
  fine.radial_points_per_bump *= 2;
  fine.points_per_wavelength *= 2;
  fine.angular_points_per_half_width *= 2;
  fine.max_angular_points *= 2;
  core::parallel_for(h_list.size(), threads, [&](std::size_t idx) {
    const double h = h_list[idx];
    const PolarGrid g = quasimode_grid(spec, h, policy);
    const PolarGrid gf = quasimode_grid(spec, h, fine);
    ResidualRow& row = out.rows[idx];
    row.h = h;
    row.n_r = g.n_r;
    row.n_theta = g.n_theta;
    row.residual_norm = residual_norm(build_quasimode_factors(spec, h, g), model, spec.energy);
    row.oracle_residual = residual_norm(build_quasimode_factors(spec, h, gf), model, spec.energy);
  });
  std::vector<double> hs, rs;
  for (auto& row : out.rows) {
    hs.push_back(row.h);
    rs.push_back(row.residual_norm);
    row.slope_so_far = hs.size() >= 2 ? loglog_slope(hs, rs) : 0.0;
    out.max_oracle_discrepancy =
        std::max(out.max_oracle_discrepancy, std::abs(row.residual_norm - row.oracle_residual) / row.oracle_residual);
  }
  out.slope = out.rows.back().slope_so_far;
  return out;
}

void write_residual_csv(std::ostream& out, const ResidualScaling& table) {
  out << "h,residual_norm,slope_so_far\n";
  for (const auto& r : table.rows)
    out << core::fmt(r.h) << ',' << core::fmt(r.residual_norm) << ',' << core::fmt(r.slope_so_far) << '\n';
}

namespace {

bool inside_collar(double r, double theta, double theta0, double C, double exponent) {
  return r > 1.0 && core::circle_distance(theta, theta0) < C * std::pow(r, -exponent);
}

}  // namespace

SupportReport support_report(const PolarField& u, double theta0, double C, double exponent) {
  const auto& g = u.grid();
  double outside = 0.0, total = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const double m = std::norm(u.at(i, j)) * g.r(i);
      total += m;
      if (!inside_collar(g.r(i), g.theta(j), theta0, C, exponent)) outside += m;
    }
  SupportReport rep;
  rep.mass_outside = total > 0.0 ? outside / total : 0.0;
  rep.contained = rep.mass_outside < 1e-10;
  return rep;
}

SupportReport support_report(const SeparableField& u, double theta0, double C, double exponent) {
  const auto& g = u.grid;
  double outside = 0.0, total = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    const double fr = std::norm(u.radial[i]) * g.r(i);
    if (fr == 0.0) continue;
    for (int j = 0; j < g.n_theta; ++j) {
      const double m = fr * std::norm(u.angular[j]);
      total += m;
      if (!inside_collar(g.r(i), g.theta(j), theta0, C, exponent)) outside += m;
    }
  }
  SupportReport rep;
  rep.mass_outside = total > 0.0 ? outside / total : 0.0;
  rep.contained = rep.mass_outside < 1e-10;
  return rep;
}

}  // namespace semilab::quasimodes
