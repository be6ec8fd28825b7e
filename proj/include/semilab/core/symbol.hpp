#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "semilab/core/potential.hpp"

namespace semilab::core {

/// Phase-space variables of a test symbol: ρ (radial momentum), θ (direction),
/// w = η/r (tangential momentum).
enum class SymbolVar { Rho, Theta, W };

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool bounded() const;
};

/// Closed arc of the circle; half_width ≥ π covers everything.
struct Arc {
  double center = 0.0;
  double half_width = 4.0;
  bool full() const;
  bool contains(double theta) const;
};

struct SupportBox {
  Interval rho;
  Arc theta;
  Interval w;
  bool contains(double rho_value, double theta_value, double w_value) const;
};

/// Smooth test observable a(ρ, θ, w) built as a small expression tree of bump
/// primitives. Values are immutable and cheap to copy (shared nodes).
class SymbolSpec {
 public:
  /// Classic bump (inner = 0) or flat-top bump (0 < inner < outer) in one variable.
  /// The θ distance is circular.
  static SymbolSpec bump(SymbolVar var, double center, double outer, double inner = 0.0);
  /// Product of three one-variable bumps centred at (rho, theta, w).
  static SymbolSpec bump3(double rho, double theta, double w, double radius);
  static SymbolSpec plateau3(double rho, double theta, double w, double inner, double outer);
  static SymbolSpec constant(double value);
  /// ρ² + w² + V∞(θ) − E; unbounded, meant to multiply a bump.
  static SymbolSpec shell_factor(const PotentialModel& model, double energy);

  SymbolSpec operator*(const SymbolSpec& other) const;
  SymbolSpec operator+(const SymbolSpec& other) const;
  SymbolSpec scaled(double factor) const;

  double operator()(double rho, double theta, double w) const;
  /// False when θ lies outside the θ-support, so a(·, θ, ·) ≡ 0.
  bool theta_may_be_nonzero(double theta) const;

  SupportBox support_box() const;
  bool is_zero() const;

 private:
  struct Node;
  explicit SymbolSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// a(ρ, θ, w); exactly zero outside a.support_box().
double eval_symbol(const SymbolSpec& a, double rho, double theta, double w);

}  // namespace semilab::core
