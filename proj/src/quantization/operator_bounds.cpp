#include "semilab/quantization/operator_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "semilab/core/smooth.hpp"

namespace semilab::quantization {

using core::CutoffFamily;
using core::SymbolSpec;

CartesianField random_trial_state(const CartesianGrid& grid, double h, Frame frame, std::mt19937_64& rng,
                                  double band_fraction) {
  CartesianField u(grid, h, frame);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& z : u.samples()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = cplx(re, im);
  }
  const int n = grid.points;
  const Fft fft({n, n});
  fft.forward(u.samples().data());
  const double limit = band_fraction * n / 2.0;
  for (int a = 0; a < n; ++a) {
    const int fa = a < n / 2 ? a : a - n;
    for (int b = 0; b < n; ++b) {
      const int fb = b < n / 2 ? b : b - n;
      if (std::abs(fa) > limit || std::abs(fb) > limit) u.at(a, b) = 0.0;
    }
  }
  fft.backward(u.samples().data());
  u.normalize();
  return u;
}

Eigen::VectorXd block_krylov_ritz_values(const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& start, int blocks) {
  const Eigen::Index n = op.rows();
  const Eigen::Index width = start.cols();
  const Eigen::Index total = std::min<Eigen::Index>(n, width * std::max(1, blocks));
  Eigen::MatrixXcd basis(n, total);
  Eigen::Index filled = 0;
  Eigen::MatrixXcd block = start;
  while (filled < total) {
    // Two rounds of block Gram–Schmidt keep the basis orthonormal to round-off.
    for (int pass = 0; pass < 2 && filled > 0; ++pass)
      block -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * block);
    const Eigen::Index take = std::min(width, total - filled);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(block);
    basis.middleCols(filled, take) = (qr.householderQ() * Eigen::MatrixXcd::Identity(n, width)).leftCols(take);
    filled += take;
    block = op * basis.middleCols(filled - take, take);
  }
  const Eigen::MatrixXcd projected = basis.adjoint() * op * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (projected + projected.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace {

CartesianGrid oracle_grid(double h, const OperatorBoundOptions& options) {
  if (options.points > 32) throw std::invalid_argument("operator bound checks run on N ≤ 32 grids");
  CartesianGrid g{options.scaled_half_width / h, options.points};
  g.validate();
  return g;
}

// Sample a regular lattice over the bounded part of the support box ([-3, 3] where unbounded).
template <typename Visit>
void sample_symbol_box(const SymbolSpec& a, int per_axis, Visit&& visit) {
  const core::SupportBox box = a.support_box();
  auto span = [](const core::Interval& iv) {
    return std::pair<double, double>{std::isfinite(iv.lo) ? iv.lo : -3.0, std::isfinite(iv.hi) ? iv.hi : 3.0};
  };
  const auto [r0, r1] = span(box.rho);
  const auto [w0, w1] = span(box.w);
  const double t0 = box.theta.full() ? 0.0 : box.theta.center - box.theta.half_width;
  const double t1 = box.theta.full() ? core::kTwoPi : box.theta.center + box.theta.half_width;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        const double s = per_axis > 1 ? 1.0 / (per_axis - 1) : 0.0;
        visit(a(r0 + (r1 - r0) * i * s, t0 + (t1 - t0) * j * s, w0 + (w1 - w0) * k * s));
      }
}

double cutoff_sup(const CutoffFamily& f, double h) {
  double mx = 0.0;
  for (int i = 0; i <= 20000; ++i) mx = std::max(mx, std::abs(f.evaluate(h, 1e-3 * i)));
  return mx;
}

std::vector<CartesianField> trial_states(const CartesianGrid& g, double h, std::mt19937_64& rng,
                                         const OperatorBoundOptions& options) {
  std::vector<CartesianField> trials;
  for (int t = 0; t < options.trials; ++t)
    trials.push_back(random_trial_state(g, h, Frame::Original, rng, options.band_fraction));
  return trials;
}

Eigen::MatrixXcd as_columns(const std::vector<CartesianField>& trials) {
  const Eigen::Index n = static_cast<Eigen::Index>(trials.front().samples().size());
  Eigen::MatrixXcd m(n, static_cast<Eigen::Index>(trials.size()));
  for (std::size_t t = 0; t < trials.size(); ++t)
    for (Eigen::Index k = 0; k < n; ++k) m(k, static_cast<Eigen::Index>(t)) = trials[t].samples()[k];
  return m;
}

}  // namespace

CalderonVaillancourtReport calderon_vaillancourt_check(const SymbolSpec& a, const CutoffFamily& f,
                                                       const std::vector<double>& h_list,
                                                       const OperatorBoundOptions& options) {
  if (options.trials < 20) throw std::invalid_argument("calderon_vaillancourt_check: need at least 20 trials");
  if (h_list.empty()) throw std::invalid_argument("calderon_vaillancourt_check: empty h list");
  CalderonVaillancourtReport rep;
  std::mt19937_64 rng(options.seed);
  double a_sup = 0.0;
  sample_symbol_box(a, 33, [&](double v) { a_sup = std::max(a_sup, std::abs(v)); });
  for (double h : h_list) {
    const CartesianGrid g = oracle_grid(h, options);
    const Eigen::MatrixXcd op = dense_weyl_matrix(g, h, Frame::Original, a, f);
    const auto trials = trial_states(g, h, rng, options);
    const Eigen::MatrixXcd cols = as_columns(trials);
    NormSample s;
    s.h = h;
    s.symbol_sup = a_sup * cutoff_sup(f, h);
    // Sample vectors are orthonormal up to the d² quadrature weight, so matrix and L² norms agree.
    const Eigen::MatrixXcd images = op * cols;
    const Eigen::MatrixXcd pairs = cols.adjoint() * images;
    const double colnorm2 = cols.col(0).squaredNorm();
    for (Eigen::Index i = 0; i < pairs.rows(); ++i)
      for (Eigen::Index j = 0; j < pairs.cols(); ++j)
        s.random_pair_max = std::max(s.random_pair_max,
                                     std::abs(pairs(i, j)) / std::sqrt(cols.col(i).squaredNorm() * colnorm2));
    const Eigen::VectorXd ritz = block_krylov_ritz_values(op, cols, options.krylov_blocks);
    s.norm_estimate = std::max(std::abs(ritz.minCoeff()), std::abs(ritz.maxCoeff()));
    if (options.exact_oracle) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (op + op.adjoint()), Eigen::EigenvaluesOnly);
      s.exact_norm = std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
    }
    rep.samples.push_back(s);
  }
  // Least squares for n = C·sup + c·√h, with c clamped at 0; then raise C until every point is covered.
  double saa = 0, sab = 0, sbb = 0, say = 0, sby = 0;
  for (const auto& s : rep.samples) {
    const double x1 = s.symbol_sup, x2 = std::sqrt(s.h), y = s.norm_estimate;
    saa += x1 * x1, sab += x1 * x2, sbb += x2 * x2, say += x1 * y, sby += x2 * y;
  }
  double C = 0.0, c = 0.0;
  const double det = saa * sbb - sab * sab;
  if (saa > 0.0 && std::abs(det) > 1e-14 * saa * sbb) {
    C = (say * sbb - sby * sab) / det;
    c = (saa * sby - sab * say) / det;
  }
  if (c < 0.0 || !(saa > 0.0) || std::abs(det) <= 1e-14 * saa * sbb) {
    c = 0.0;
    C = saa > 0.0 ? say / saa : 0.0;
  }
  for (const auto& s : rep.samples) {
    if (s.symbol_sup > 0.0) C = std::max(C, (s.norm_estimate - c * std::sqrt(s.h)) / s.symbol_sup);
    else if (s.norm_estimate > c * std::sqrt(s.h)) c = s.norm_estimate / std::sqrt(s.h);
  }
  rep.fitted_C = std::max(C, 0.0);
  rep.fitted_c = c;
  rep.pass = rep.fitted_C <= options.constant_limit;
  return rep;
}

GardingReport garding_check(const SymbolSpec& a, const CutoffFamily& f, const std::vector<double>& h_list,
                            const OperatorBoundOptions& options) {
  if (options.trials < 20) throw std::invalid_argument("garding_check: need at least 20 trials");
  if (h_list.empty()) throw std::invalid_argument("garding_check: empty h list");
  double a_min = 0.0;
  sample_symbol_box(a, 25, [&](double v) { a_min = std::min(a_min, v); });
  if (a_min < 0.0) throw std::invalid_argument("garding_check: symbol takes negative values");
  for (double h : h_list)
    for (int i = 0; i <= 2000; ++i)
      if (f.evaluate(h, 0.01 * i) < 0.0) throw std::invalid_argument("garding_check: cutoff takes negative values");

  GardingReport rep;
  std::mt19937_64 rng(options.seed);
  for (double h : h_list) {
    const CartesianGrid g = oracle_grid(h, options);
    const Eigen::MatrixXcd op = dense_weyl_matrix(g, h, Frame::Original, a, f);
    const auto trials = trial_states(g, h, rng, options);
    GardingSample s;
    s.h = h;
    s.min_trial_pairing = std::numeric_limits<double>::infinity();
    for (const auto& u : trials) {
      Eigen::Map<const Eigen::VectorXcd> v(u.samples().data(), static_cast<Eigen::Index>(u.samples().size()));
      const double d = g.spacing();
      const double pairing = (v.adjoint() * op * v)(0, 0).real() * d * d;
      s.min_trial_pairing = std::min(s.min_trial_pairing, pairing);
    }
    const Eigen::VectorXd ritz = block_krylov_ritz_values(op, as_columns(trials), options.krylov_blocks);
    s.min_estimate = std::min(s.min_trial_pairing, ritz.minCoeff());
    if (options.exact_oracle) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (op + op.adjoint()), Eigen::EigenvaluesOnly);
      s.exact_min = es.eigenvalues().minCoeff();
      s.has_exact = true;
    }
    rep.samples.push_back(s);
  }
  double C = 0.0;
  std::vector<std::pair<double, double>> negatives;
  for (const auto& s : rep.samples) {
    C = std::max(C, -s.min_estimate / s.h);
    if (s.min_estimate < -options.constant_limit * s.h) ++rep.violations;
    if (s.min_estimate < 0.0) negatives.emplace_back(std::log(s.h), std::log(-s.min_estimate));
  }
  if (negatives.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : negatives) mx += x, my += y;
    mx /= negatives.size(), my /= negatives.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : negatives) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    rep.slope = sxx > 0 ? sxy / sxx : 0.0;
  }
  rep.fitted_C = C;
  rep.pass = C <= options.constant_limit;
  return rep;
}

}  // namespace semilab::quantization
