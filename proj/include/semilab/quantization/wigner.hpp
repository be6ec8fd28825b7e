#pragma once

#include <iosfwd>
#include <vector>

#include "semilab/quantization/cartesian_field.hpp"

namespace semilab::quantization {

/// Lag window shared by the Wigner transform and the streaming pairing.
struct LagWindow {
  int i_lo = 0, i_hi = -1, j_lo = 0, j_hi = -1;  ///< index box holding the state's support
  int max_lag = 0;                              ///< K: lags k with |k_a| ≤ K
  int size = 0;                                 ///< M: FFT length per axis (power of two)
};

/// Support box = samples with |u| > 1e-14·max|u|; M = next power of two ≥ max(2K + 2, 64),
/// capped at N.
LagWindow lag_window(const CartesianField& u);

/// Discrete Wigner transform with even lags y = 2kd:
/// W(x, Ξ_m) = (2πħ)^{-2} (2d)² Σ_k e^{-2πi k·m/M} u(x + kd) conj(u(x - kd)),
/// Ξ_m = m·πħ/(M d), m ∈ [-M/2, M/2). The discrete mass identity ΣΣ W ΔxΔΞ = ‖u‖² is exact
/// for stride 1. States must be band-limited to |Ξ| < πħ/(2d).
struct WignerGrid {
  int stride = 1;
  int momentum_points = 0;  ///< M
  double hbar = 1.0;
  double spatial_spacing = 0.0;   ///< stride·d
  double momentum_spacing = 0.0;  ///< ΔΞ
  std::vector<double> x1, x2;     ///< coordinates of the stored spatial points
  /// values[p·M² + a·M + b] at (x1[p], x2[p]; Ξ_{a-M/2}, Ξ_{b-M/2}).
  std::vector<double> values;
  double max_imag = 0.0;  ///< largest |Im W| discarded

  std::size_t points() const { return x1.size(); }
  double momentum(int a) const { return (a - momentum_points / 2) * momentum_spacing; }
  double value(std::size_t p, int a, int b) const {
    return values[(p * momentum_points + a) * momentum_points + b];
  }
  /// Σ W Δx² ΔΞ².
  double mass() const;
};

/// Throws std::invalid_argument unless stride ≥ 1 divides N.
WignerGrid wigner_transform(const CartesianField& u, int stride);

/// Momentum-plane slice at stored spatial point p: header "x1,x2,M,dXi" then M rows of M values.
void write_wigner_slice(std::ostream& out, const WignerGrid& w, std::size_t p);

}  // namespace semilab::quantization
