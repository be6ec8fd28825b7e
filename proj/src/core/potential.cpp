#include "semilab/core/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "semilab/core/smooth.hpp"

namespace semilab::core {

PotentialModel::PotentialModel(std::vector<FourierMode> modes, std::optional<ShortRange> short_range,
                               double energy)
    : modes_(std::move(modes)), short_range_(short_range), energy_(energy) {
  for (const auto& mode : modes_) {
    if (mode.m < 0) throw std::invalid_argument("Fourier mode index must be non-negative");
    if (!std::isfinite(mode.cos_coeff) || !std::isfinite(mode.sin_coeff))
      throw std::invalid_argument("Fourier coefficients must be finite");
  }
  if (short_range_) {
    if (!(short_range_->decay_exponent > 1.0))
      throw std::invalid_argument("short-range decay_exponent must exceed 1");
    if (!(short_range_->radial_scale > 0.0))
      throw std::invalid_argument("short-range radial_scale must be positive");
  }
}

PotentialModel PotentialModel::cosine(double energy) { return PotentialModel({{1, 1.0, 0.0}}, std::nullopt, energy); }

PotentialModel PotentialModel::degenerate_quartic(double energy) {
  return PotentialModel({{0, 1.5, 0.0}, {1, -2.0, 0.0}, {2, 0.5, 0.0}}, std::nullopt, energy);
}

PotentialModel PotentialModel::zero(double energy) { return PotentialModel({}, std::nullopt, energy); }

PotentialModel PotentialModel::with_energy(double energy) const {
  PotentialModel copy = *this;
  copy.energy_ = energy;
  return copy;
}

double PotentialModel::v_inf(double theta) const { return v_inf_derivative(theta, 0); }

double PotentialModel::v_inf_derivative(double theta, int order) const {
  double sum = 0.0;
  for (const auto& mode : modes_) {
    if (mode.m == 0) {
      if (order == 0) sum += mode.cos_coeff;
      continue;
    }
    const double scale = std::pow(static_cast<double>(mode.m), order);
    const double c = std::cos(mode.m * theta), s = std::sin(mode.m * theta);
    // d^k/dθ^k of cos and sin cycle with period 4; avoids cos(x + π/2) round-off.
    double dcos = c, dsin = s;
    switch (order % 4) {
      case 1: dcos = -s; dsin = c; break;
      case 2: dcos = -c; dsin = -s; break;
      case 3: dcos = s; dsin = -c; break;
      default: break;
    }
    sum += scale * (mode.cos_coeff * dcos + mode.sin_coeff * dsin);
  }
  return sum;
}

double PotentialModel::v_short(double r) const {
  if (!short_range_) return 0.0;
  return short_range_->amplitude * std::pow(1.0 + r / short_range_->radial_scale, -short_range_->decay_exponent);
}

double PotentialModel::v_inf_bound() const {
  double bound = 0.0;
  for (const auto& mode : modes_) bound += std::abs(mode.cos_coeff) + (mode.m == 0 ? 0.0 : std::abs(mode.sin_coeff));
  return bound;
}

bool PotentialModel::is_constant() const {
  return std::all_of(modes_.begin(), modes_.end(), [](const FourierMode& mode) {
    return mode.m == 0 || (mode.cos_coeff == 0.0 && mode.sin_coeff == 0.0);
  });
}

namespace {

// Golden-section minimisation of g on [a, b].
template <typename G>
double golden_minimise(G&& g, double a, double b, double tol = 1e-13) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double gc = g(c), gd = g(d);
  while (std::abs(b - a) > tol) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

double sampled_extremum(const PotentialModel& model, double sign) {
  constexpr int n = 4096;
  const double step = kTwoPi / n;
  int best = 0;
  double best_value = sign * model.v_inf(0.0);
  for (int i = 1; i < n; ++i) {
    const double v = sign * model.v_inf(i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double theta =
      golden_minimise([&](double t) { return sign * model.v_inf(t); }, (best - 1) * step, (best + 1) * step);
  return std::min(best_value, sign * model.v_inf(theta)) * sign;
}

}  // namespace

double PotentialModel::v_inf_min() const { return sampled_extremum(*this, 1.0); }
double PotentialModel::v_inf_max() const { return sampled_extremum(*this, -1.0); }

double eval_potential(const PotentialModel& model, double r, double theta) {
  return model.v_inf(theta) + model.v_short(r);
}

std::vector<double> potential_derivatives(const PotentialModel& model, double theta, int max_order) {
  if (max_order > 8) throw std::invalid_argument("potential_derivatives: max_order must be ≤ 8");
  std::vector<double> out;
  for (int m = 1; m <= max_order; ++m) out.push_back(model.v_inf_derivative(theta, m));
  return out;
}

int critical_order(const PotentialModel& model, double theta, double order_tol) {
  int k = 0;
  while (k < 8 && std::abs(model.v_inf_derivative(theta, k + 1)) <= order_tol) ++k;
  return k;
}

namespace {

// Polish an approximate root of ∂θV. At a degenerate critical point the root of
// ∂θV is ill-conditioned, but the lowest non-vanishing derivative has a simple
// root of the preceding one; Newton on that derivative recovers full precision.
double polish_root(const PotentialModel& model, double theta) {
  constexpr double loose = 1e-3;
  int m = 1;
  while (m < 8 && std::abs(model.v_inf_derivative(theta, m + 1)) <= loose) ++m;
  double t = theta;
  for (int it = 0; it < 50; ++it) {
    const double f = model.v_inf_derivative(t, m);
    const double df = model.v_inf_derivative(t, m + 1);
    if (df == 0.0) break;
    const double step = f / df;
    t -= step;
    if (std::abs(step) < 1e-16) break;
  }
  if (std::abs(t - theta) > 1e-3) return theta;
  if (std::abs(model.v_inf_derivative(t, 1)) > std::abs(model.v_inf_derivative(theta, 1)) + 1e-14) return theta;
  return t;
}

}  // namespace

CriticalPointSet find_critical_points(const PotentialModel& model, double tol, const CriticalPointOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_critical_points: tol must be positive");
  CriticalPointSet result;
  if (model.is_constant()) {
    result.degenerate = true;
    return result;
  }
  const int n = options.samples;
  const double step = kTwoPi / n;
  auto dv = [&](double t) { return model.v_inf_derivative(t, 1); };
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = dv(i * step);

  std::vector<double> candidates;
  for (int i = 0; i < n; ++i) {
    const double a = i * step;
    const double fa = values[i];
    const double fb = values[(i + 1) % n];
    if (fa == 0.0) {
      candidates.push_back(a);
      continue;
    }
    if (fa * fb < 0.0) {
      double lo = a, hi = a + step, flo = fa;
      while (hi - lo > options.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dv(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      candidates.push_back(0.5 * (lo + hi));
      continue;
    }
    // Touching zero without a sign change: local minimum of |∂θV| among samples.
    const double fprev = values[(i + n - 1) % n];
    if (std::abs(fa) < std::abs(fprev) && std::abs(fa) <= std::abs(fb) && std::abs(fa) < 1e-2) {
      const double t = golden_minimise([&](double x) { return std::abs(dv(x)); }, a - step, a + step);
      if (std::abs(dv(t)) <= tol) candidates.push_back(t);
    }
  }

  for (double c : candidates) {
    const double theta = wrap_angle(polish_root(model, c));
    if (std::abs(dv(theta)) > tol) continue;
    const bool duplicate = std::any_of(result.points.begin(), result.points.end(), [&](const CriticalPoint& p) {
      return circle_distance(p.theta0, theta) < 1e-6;
    });
    if (duplicate) continue;
    result.points.push_back({theta, critical_order(model, theta, options.order_tol), model.v_inf(theta)});
  }
  std::sort(result.points.begin(), result.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.theta0 < b.theta0; });
  return result;
}

}  // namespace semilab::core
