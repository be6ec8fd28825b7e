#include "semilab/quantization/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "semilab/core/format.hpp"

namespace semilab::quantization {

LagWindow lag_window(const CartesianField& u) {
  const int n = u.grid().points;
  double peak = 0.0;
  for (const auto& z : u.samples()) peak = std::max(peak, std::abs(z));
  LagWindow w;
  if (peak == 0.0) return w;
  const double floor = 1e-14 * peak;
  w.i_lo = n, w.j_lo = n, w.i_hi = -1, w.j_hi = -1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(u.at(i, j)) > floor) {
        w.i_lo = std::min(w.i_lo, i);
        w.i_hi = std::max(w.i_hi, i);
        w.j_lo = std::min(w.j_lo, j);
        w.j_hi = std::max(w.j_hi, j);
      }
  const int extent = std::max(w.i_hi - w.i_lo, w.j_hi - w.j_lo);
  w.max_lag = (extent + 1) / 2;
  int m = 64;
  while (m < 2 * w.max_lag + 2) m *= 2;
  w.size = std::min(m, n);
  w.max_lag = std::min(w.max_lag, w.size / 2 - 1);
  return w;
}

double WignerGrid::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * spatial_spacing * spatial_spacing * momentum_spacing * momentum_spacing;
}

WignerGrid wigner_transform(const CartesianField& u, int stride) {
  const int n = u.grid().points;
  if (stride < 1 || n % stride != 0) throw std::invalid_argument("wigner_transform: stride must divide N");
  const LagWindow lw = lag_window(u);
  const double d = u.grid().spacing();
  WignerGrid w;
  w.stride = stride;
  w.hbar = u.hbar();
  w.spatial_spacing = stride * d;
  w.momentum_points = lw.size > 0 ? lw.size : std::min(64, n);
  const int m = w.momentum_points;
  w.momentum_spacing = std::numbers::pi * w.hbar / (m * d);
  const double prefactor = std::pow(2.0 * d / (2.0 * std::numbers::pi * w.hbar), 2);

  Fft fft({m, m});
  std::vector<cplx> buf(static_cast<std::size_t>(m) * m);
  std::vector<double> plane(static_cast<std::size_t>(m) * m);
  const int K = lw.max_lag;
  for (int i = 0; i < n; i += stride) {
    for (int j = 0; j < n; j += stride) {
      w.x1.push_back(u.grid().coord(i));
      w.x2.push_back(u.grid().coord(j));
      const bool inside = i >= lw.i_lo && i <= lw.i_hi && j >= lw.j_lo && j <= lw.j_hi;
      if (!inside) {
        w.values.insert(w.values.end(), plane.size(), 0.0);
        continue;
      }
      std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
      for (int k1 = -K; k1 <= K; ++k1) {
        const int ip = i + k1, im = i - k1;
        if (ip < lw.i_lo || ip > lw.i_hi || im < lw.i_lo || im > lw.i_hi) continue;
        for (int k2 = -K; k2 <= K; ++k2) {
          const int jp = j + k2, jm = j - k2;
          if (jp < lw.j_lo || jp > lw.j_hi || jm < lw.j_lo || jm > lw.j_hi) continue;
          buf[static_cast<std::size_t>((k1 + m) % m) * m + (k2 + m) % m] = u.at(ip, jp) * std::conj(u.at(im, jm));
        }
      }
      fft.forward(buf.data());
      // Shift so that stored index a corresponds to Ξ_{a - M/2}.
      for (int a = 0; a < m; ++a) {
        const int sa = (a - m / 2 + m) % m;
        for (int b = 0; b < m; ++b) {
          const int sb = (b - m / 2 + m) % m;
          const cplx v = buf[static_cast<std::size_t>(sa) * m + sb] * prefactor;
          w.max_imag = std::max(w.max_imag, std::abs(v.imag()));
          plane[static_cast<std::size_t>(a) * m + b] = v.real();
        }
      }
      w.values.insert(w.values.end(), plane.begin(), plane.end());
    }
  }
  return w;
}

void write_wigner_slice(std::ostream& out, const WignerGrid& w, std::size_t p) {
  if (p >= w.points()) throw std::out_of_range("write_wigner_slice: point index out of range");
  const int m = w.momentum_points;
  out << "x1,x2,M,dXi\n"
      << core::fmt(w.x1[p]) << ',' << core::fmt(w.x2[p]) << ',' << m << ',' << core::fmt(w.momentum_spacing) << '\n';
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) out << (b ? "," : "") << core::fmt(w.value(p, a, b));
    out << '\n';
  }
}

}  // namespace semilab::quantization
