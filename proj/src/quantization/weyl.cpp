#include "semilab/quantization/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "semilab/core/format.hpp"
#include "semilab/core/parallel.hpp"
#include "semilab/core/smooth.hpp"
#include "semilab/quantization/wigner.hpp"

namespace semilab::quantization {

using core::CutoffFamily;
using core::SupportBox;
using core::SymbolSpec;

PolarCoordinates polar_coordinates(double x1, double x2, double xi1, double xi2) {
  PolarCoordinates p;
  p.r = std::hypot(x1, x2);
  p.theta = core::wrap_angle(std::atan2(x2, x1));
  const double c = p.r > 0.0 ? x1 / p.r : 1.0, s = p.r > 0.0 ? x2 / p.r : 0.0;
  p.rho = c * xi1 + s * xi2;
  p.w = -s * xi1 + c * xi2;
  return p;
}

double polar_symbol_eval(const SymbolSpec& a, const CutoffFamily& f, double h, double x1, double x2, double xi1,
                         double xi2) {
  const PolarCoordinates p = polar_coordinates(x1, x2, xi1, xi2);
  if (p.r <= f.epsilon()) return 0.0;
  const double fr = f.evaluate(h, p.r);
  if (fr == 0.0) return 0.0;
  return fr * a(p.rho, p.theta, p.w);
}

namespace {

bool rho_w_inside(const SupportBox& box, double rho, double w) { return box.rho.contains(rho) && box.w.contains(w); }

}  // namespace

std::vector<PairingValue> weyl_pairings(const CartesianField& u, const std::vector<SymbolSpec>& symbols,
                                        const CutoffFamily& f, const PairingOptions& options) {
  const CartesianField dilated = u.frame() == Frame::Original ? dilate(u, DilationDirection::Forward) : u;
  const auto& grid = dilated.grid();
  const int n = grid.points;
  const int s = options.stride;
  if (s < 1 || n % s != 0) throw std::invalid_argument("weyl_pairing: stride must divide N");
  const std::size_t ns = symbols.size();
  std::vector<PairingValue> result(ns);
  if (ns == 0) return result;

  const double h = dilated.h();
  const double d = grid.spacing();
  const LagWindow lw = lag_window(dilated);
  if (lw.size == 0) return result;  // zero state
  const int m = lw.size, K = lw.max_lag;
  const double dxi = std::numbers::pi * h / (m * d);
  const double prefactor = std::pow(2.0 * d / (2.0 * std::numbers::pi * h), 2);

  std::vector<SupportBox> boxes;
  std::vector<bool> live(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    boxes.push_back(symbols[k].support_box());
    live[k] = !symbols[k].is_zero();
  }

  struct Site {
    int i, j;
    double theta, fr;
    bool coarse;
  };
  std::vector<Site> sites;
  for (int i = lw.i_lo; i <= lw.i_hi; ++i) {
    if (i % s) continue;
    for (int j = lw.j_lo; j <= lw.j_hi; ++j) {
      if (j % s) continue;
      const double x1 = grid.coord(i), x2 = grid.coord(j);
      const double r = std::hypot(x1, x2);
      if (r <= f.epsilon()) continue;
      const double fr = f.evaluate(h, r);
      if (fr == 0.0) continue;
      const double theta = core::wrap_angle(std::atan2(x2, x1));
      bool any = false;
      for (std::size_t k = 0; k < ns && !any; ++k) any = live[k] && symbols[k].theta_may_be_nonzero(theta);
      if (!any) continue;
      sites.push_back({i, j, theta, fr, i % (2 * s) == 0 && j % (2 * s) == 0});
    }
  }

  // Per-site partial sums (real and imaginary parts per symbol), reduced in site order.
  std::vector<double> partial(sites.size() * 2 * ns, 0.0);
  const Fft fft({m, m});
  core::parallel_for(sites.size(), options.threads, [&](std::size_t idx) {
    const Site& site = sites[idx];
    std::vector<cplx> buf(static_cast<std::size_t>(m) * m, cplx(0.0, 0.0));
    for (int k1 = -K; k1 <= K; ++k1) {
      const int ip = site.i + k1, im = site.i - k1;
      if (ip < lw.i_lo || ip > lw.i_hi || im < lw.i_lo || im > lw.i_hi) continue;
      for (int k2 = -K; k2 <= K; ++k2) {
        const int jp = site.j + k2, jm = site.j - k2;
        if (jp < lw.j_lo || jp > lw.j_hi || jm < lw.j_lo || jm > lw.j_hi) continue;
        buf[static_cast<std::size_t>((k1 + m) % m) * m + (k2 + m) % m] =
            dilated.at(ip, jp) * std::conj(dilated.at(im, jm));
      }
    }
    fft.forward(buf.data());
    const double c = std::cos(site.theta), sn = std::sin(site.theta);
    double* out = &partial[idx * 2 * ns];
    for (int a = 0; a < m; ++a) {
      const int fa = a < m / 2 ? a : a - m;  // frequency index
      const double xi1 = fa * dxi;
      for (int b = 0; b < m; ++b) {
        const int fb = b < m / 2 ? b : b - m;
        const double xi2 = fb * dxi;
        const double rho = c * xi1 + sn * xi2, w = -sn * xi1 + c * xi2;
        const cplx wv = buf[static_cast<std::size_t>(a) * m + b];
        for (std::size_t k = 0; k < ns; ++k) {
          if (!live[k] || !rho_w_inside(boxes[k], rho, w)) continue;
          const double sym = symbols[k](rho, site.theta, w);
          if (sym == 0.0) continue;
          out[2 * k] += sym * wv.real();
          out[2 * k + 1] += sym * wv.imag();
        }
      }
    }
    for (std::size_t k = 0; k < ns; ++k) {
      out[2 * k] *= site.fr;
      out[2 * k + 1] *= site.fr;
    }
  });

  const double fine_weight = prefactor * std::pow(s * d * dxi, 2);
  const double coarse_weight = prefactor * std::pow(2 * s * d * dxi, 2);
  for (std::size_t k = 0; k < ns; ++k) {
    double fine = 0.0, fine_im = 0.0, coarse = 0.0;
    for (std::size_t idx = 0; idx < sites.size(); ++idx) {
      fine += partial[idx * 2 * ns + 2 * k];
      fine_im += partial[idx * 2 * ns + 2 * k + 1];
      if (sites[idx].coarse) coarse += partial[idx * 2 * ns + 2 * k];
    }
    result[k].value = fine * fine_weight;
    result[k].imag = fine_im * fine_weight;
    result[k].error_estimate = std::abs(fine * fine_weight - coarse * coarse_weight);
  }
  return result;
}

PairingValue weyl_pairing(const CartesianField& u, const SymbolSpec& a, const CutoffFamily& f,
                          const PairingOptions& options) {
  return weyl_pairings(u, {a}, f, options).front();
}

namespace {

// Visits K_m for every half-grid midpoint m = i + j whose symbol slice is not
// identically zero. The kernel array has extent 2N per axis, indexed by δ mod 2N.
template <typename Visit>
void for_each_midpoint_kernel(const CartesianGrid& grid, double h, Frame frame, const SymbolSpec& a,
                              const CutoffFamily& f, Visit&& visit) {
  const int n = grid.points, n2 = 2 * n;
  const double d = grid.spacing();
  const double position_scale = frame == Frame::Original ? h : 1.0;
  const double hbar = frame == Frame::Original ? 1.0 : h;
  const double dxi = std::numbers::pi * hbar / (n * d);
  const SupportBox box = a.support_box();
  if (a.is_zero()) return;
  const Fft fft({n2, n2});
  std::vector<cplx> kernel(static_cast<std::size_t>(n2) * n2);
  const double norm = 1.0 / (4.0 * n * n);
  for (int m1 = 0; m1 <= 2 * n - 2; ++m1) {
    for (int m2 = 0; m2 <= 2 * n - 2; ++m2) {
      const double x1 = position_scale * (-grid.half_width + 0.5 * m1 * d);
      const double x2 = position_scale * (-grid.half_width + 0.5 * m2 * d);
      const double r = std::hypot(x1, x2);
      if (r <= f.epsilon()) continue;
      const double fr = f.evaluate(h, r);
      if (fr == 0.0) continue;
      const double theta = core::wrap_angle(std::atan2(x2, x1));
      if (!a.theta_may_be_nonzero(theta)) continue;
      const double c = std::cos(theta), s = std::sin(theta);
      bool any = false;
      for (int k1 = 0; k1 < n2; ++k1) {
        const double xi1 = (k1 - n) * dxi;
        for (int k2 = 0; k2 < n2; ++k2) {
          const double xi2 = (k2 - n) * dxi;
          const double rho = c * xi1 + s * xi2, w = -s * xi1 + c * xi2;
          double v = 0.0;
          if (rho_w_inside(box, rho, w)) v = fr * a(rho, theta, w);
          kernel[static_cast<std::size_t>(k1) * n2 + k2] = v;
          any = any || v != 0.0;
        }
      }
      if (!any) continue;
      fft.backward(kernel.data());
      for (int k1 = 0; k1 < n2; ++k1)
        for (int k2 = 0; k2 < n2; ++k2) {
          // (-1)^{δ₁+δ₂} from shifting the momentum grid to start at -N; δ ≡ index mod 2N.
          const double sign = ((k1 + k2) & 1) ? -1.0 : 1.0;
          kernel[static_cast<std::size_t>(k1) * n2 + k2] *= sign * norm;
        }
      visit(m1, m2, kernel);
    }
  }
}

template <typename Pair>
void for_each_pair(int n, int m1, int m2, Pair&& pair) {
  const int lo1 = std::max(0, m1 - n + 1), hi1 = std::min(n - 1, m1);
  const int lo2 = std::max(0, m2 - n + 1), hi2 = std::min(n - 1, m2);
  for (int i1 = lo1; i1 <= hi1; ++i1)
    for (int i2 = lo2; i2 <= hi2; ++i2) pair(i1, i2, m1 - i1, m2 - i2);
}

}  // namespace

CartesianField dense_weyl_apply(const CartesianField& u, const SymbolSpec& a, const CutoffFamily& f) {
  const int n = u.grid().points;
  if (n > 64) throw std::invalid_argument("dense_weyl_apply: N > 64 is beyond the oracle's cost guard");
  CartesianField out(u.grid(), u.h(), u.frame());
  const int n2 = 2 * n;
  for_each_midpoint_kernel(u.grid(), u.h(), u.frame(), a, f, [&](int m1, int m2, const std::vector<cplx>& kernel) {
    for_each_pair(n, m1, m2, [&](int i1, int i2, int j1, int j2) {
      const int d1 = (i1 - j1 + n2) % n2, d2 = (i2 - j2 + n2) % n2;
      out.at(i1, i2) += kernel[static_cast<std::size_t>(d1) * n2 + d2] * u.at(j1, j2);
    });
  });
  return out;
}

Eigen::MatrixXcd dense_weyl_matrix(const CartesianGrid& grid, double h, Frame frame, const SymbolSpec& a,
                                   const CutoffFamily& f) {
  grid.validate();
  const int n = grid.points;
  if (n > 32) throw std::invalid_argument("dense_weyl_matrix: N > 32 is beyond the oracle's cost guard");
  const int n2 = 2 * n;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(n * n, n * n);
  for_each_midpoint_kernel(grid, h, frame, a, f, [&](int m1, int m2, const std::vector<cplx>& kernel) {
    for_each_pair(n, m1, m2, [&](int i1, int i2, int j1, int j2) {
      const int d1 = (i1 - j1 + n2) % n2, d2 = (i2 - j2 + n2) % n2;
      mat(i1 * n + i2, j1 * n + j2) = kernel[static_cast<std::size_t>(d1) * n2 + d2];
    });
  });
  return mat;
}

void PairingTable::add(PairingRow row) {
  for (const auto& existing : rows_)
    if (existing.h == row.h && existing.symbol_id == row.symbol_id && existing.cutoff_id == row.cutoff_id)
      throw std::invalid_argument("PairingTable: duplicate cell (" + core::fmt(row.h) + ", " + row.symbol_id + ", " +
                                  row.cutoff_id + ")");
  rows_.push_back(std::move(row));
}

std::vector<PairingRow> PairingTable::series(const std::string& symbol_id, const std::string& cutoff_id) const {
  std::vector<PairingRow> out;
  for (const auto& r : rows_)
    if (r.symbol_id == symbol_id && r.cutoff_id == cutoff_id) out.push_back(r);
  return out;
}

void PairingTable::write_csv(std::ostream& out) const {
  out << "h,symbol_id,cutoff_id,value,err\n";
  for (const auto& r : rows_) {
    out << core::fmt(r.h) << ',' << r.symbol_id << ',' << r.cutoff_id << ',' << (r.valid ? core::fmt(r.value) : "nan")
        << ',' << (r.valid ? core::fmt(r.error) : "nan") << '\n';
  }
}

}  // namespace semilab::quantization
