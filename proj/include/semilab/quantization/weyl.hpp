#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semilab/core/cutoff.hpp"
#include "semilab/core/symbol.hpp"
#include "semilab/quantization/cartesian_field.hpp"

namespace semilab::quantization {

/// Symbol variables of a phase-space point: ρ = x̂·ξ, θ = arg x, w = ξ·(-sin θ, cos θ).
struct PolarCoordinates {
  double r = 0.0;
  double rho = 0.0;
  double theta = 0.0;
  double w = 0.0;
};

PolarCoordinates polar_coordinates(double x1, double x2, double xi1, double xi2);

/// f_h(|x|)·a(ρ, θ, w) at a dilated-frame point; 0 when |x| ≤ epsilon of the cutoff.
double polar_symbol_eval(const core::SymbolSpec& a, const core::CutoffFamily& f, double h, double x1, double x2,
                         double xi1, double xi2);

struct PairingOptions {
  int stride = 1;
  unsigned threads = 1;
};

struct PairingValue {
  double value = 0.0;
  double imag = 0.0;            ///< imaginary residue of the quadrature (should vanish)
  double error_estimate = 0.0;  ///< |v(stride) - v(2·stride)|
};

/// ⟨u, Op_{f_h}(a) u⟩ = ∫∫ ã W_{U_h u} dX dΞ in the dilated frame, for several symbols in
/// one pass over the Wigner transform (computed on the fly, never stored). Original-frame
/// inputs are dilated first.
std::vector<PairingValue> weyl_pairings(const CartesianField& u, const std::vector<core::SymbolSpec>& symbols,
                                        const core::CutoffFamily& f, const PairingOptions& options = {});
PairingValue weyl_pairing(const CartesianField& u, const core::SymbolSpec& a, const core::CutoffFamily& f,
                          const PairingOptions& options = {});

/// Direct quadrature of the Weyl double integral with half-grid midpoints and a 2N×2N
/// momentum grid; exact for a ≡ 1 and for position-only symbols. Refuses N > 64.
CartesianField dense_weyl_apply(const CartesianField& u, const core::SymbolSpec& a, const core::CutoffFamily& f);

/// Matrix of the same discretization acting on sample vectors (row-major index i·N + j).
/// Refuses N > 32.
Eigen::MatrixXcd dense_weyl_matrix(const CartesianGrid& grid, double h, Frame frame, const core::SymbolSpec& a,
                                   const core::CutoffFamily& f);

struct PairingRow {
  double h = 0.0;
  std::string symbol_id;
  std::string cutoff_id;
  double value = 0.0;
  double error = 0.0;
  bool valid = true;
  std::string note;  ///< reason when invalid
};

/// Rows keyed by (h, symbol, cutoff); inserting a duplicate key throws std::invalid_argument.
class PairingTable {
 public:
  void add(PairingRow row);
  const std::vector<PairingRow>& rows() const { return rows_; }
  /// Rows for one symbol and cutoff in insertion order.
  std::vector<PairingRow> series(const std::string& symbol_id, const std::string& cutoff_id) const;
  /// CSV columns h,symbol_id,cutoff_id,value,err (invalid cells carry value "nan").
  void write_csv(std::ostream& out) const;

 private:
  std::vector<PairingRow> rows_;
};

}  // namespace semilab::quantization
