#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "semilab/quantization/weyl.hpp"

namespace semilab::quantization {

struct OperatorBoundOptions {
  int points = 32;            ///< N of the oracle grid (≤ 32)
  double scaled_half_width = 2.5;  ///< L = scaled_half_width / h in the original frame
  int trials = 20;
  std::uint64_t seed = 1;
  double band_fraction = 0.6;
  int krylov_blocks = 8;      ///< block-Krylov depth used to refine extreme eigenvalues
  bool exact_oracle = false;  ///< also diagonalize the full matrix
  double constant_limit = 3.0;
};

/// Complex white noise restricted to the inner band_fraction of the grid's frequency range,
/// normalized on the grid.
CartesianField random_trial_state(const CartesianGrid& grid, double h, Frame frame, std::mt19937_64& rng,
                                  double band_fraction);

struct NormSample {
  double h = 0.0;
  double symbol_sup = 0.0;
  double random_pair_max = 0.0;  ///< max |⟨v, Op u⟩| over trial pairs
  double norm_estimate = 0.0;    ///< Ritz value in the block-Krylov space of the trials
  double exact_norm = -1.0;      ///< -1 unless exact_oracle
};

struct CalderonVaillancourtReport {
  std::vector<NormSample> samples;
  double fitted_C = 0.0;  ///< smallest C with norm ≤ C·sup|a| + c·h^{1/2} at every h
  double fitted_c = 0.0;  ///< c ≥ 0 from the least-squares fit
  bool pass = false;      ///< fitted_C ≤ constant_limit
};

/// Requires trials ≥ 20; throws std::invalid_argument otherwise.
CalderonVaillancourtReport calderon_vaillancourt_check(const core::SymbolSpec& a, const core::CutoffFamily& f,
                                                       const std::vector<double>& h_list,
                                                       const OperatorBoundOptions& options = {});

struct GardingSample {
  double h = 0.0;
  double min_trial_pairing = 0.0;  ///< min ⟨u, Op u⟩ over the random trials
  double min_estimate = 0.0;       ///< smallest Ritz value in the block-Krylov space
  double exact_min = 0.0;          ///< NaN-free only if exact_oracle
  bool has_exact = false;
};

struct GardingReport {
  std::vector<GardingSample> samples;
  double fitted_C = 0.0;  ///< max(0, max_h -min/h)
  double slope = 0.0;     ///< log-log slope of max(-min, 0) vs h, 0 when no negative values
  int violations = 0;     ///< h with min < -constant_limit·h
  bool pass = false;
};

/// Requires a ≥ 0 (sampled on its support box) and f ≥ 0; throws std::invalid_argument otherwise.
GardingReport garding_check(const core::SymbolSpec& a, const core::CutoffFamily& f, const std::vector<double>& h_list,
                            const OperatorBoundOptions& options = {});

/// Orthonormal block-Krylov basis of span{T, AT, ..., A^{blocks-1}T}; Ritz values ascending.
Eigen::VectorXd block_krylov_ritz_values(const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& start, int blocks);

}  // namespace semilab::quantization
