#pragma once

#include "semilab/quantization/cartesian_field.hpp"
#include "semilab/quasimodes/polar_field.hpp"

namespace semilab::propagation {

using quantization::CartesianField;
using quantization::CartesianGrid;
using quantization::cplx;

struct TransportResult {
  CartesianField field;  ///< original frame, unit norm (or zero)
  double polar_norm = 0.0;
  double cartesian_norm = 0.0;  ///< before renormalization
  double deficit = 0.0;         ///< |1 - cartesian_norm² / polar_norm²|
};

/// Resample a polar field on a Cartesian grid by cubic convolution in (r, θ), θ periodic.
/// Preconditions: the radial support sits inside the inner 95% of the box, and the
/// narrowest feature (radial support width, angular support arc at its inner radius)
/// spans at least 4 Cartesian spacings; SupportEscapeError / ResolutionError otherwise.
/// The quadrature deficit must stay below 1e-4 (ResolutionError) before renormalizing.
TransportResult polar_to_cartesian(const quasimodes::SeparableField& u, const CartesianGrid& target);
TransportResult polar_to_cartesian(const quasimodes::PolarField& u, const CartesianGrid& target);

}  // namespace semilab::propagation
