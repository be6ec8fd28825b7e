#include "semilab/core/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "semilab/core/smooth.hpp"

namespace semilab::core {

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

bool Arc::full() const { return half_width >= std::numbers::pi; }

bool Arc::contains(double theta) const { return full() || circle_distance(theta, center) <= half_width; }

bool SupportBox::contains(double rho_value, double theta_value, double w_value) const {
  return rho.contains(rho_value) && theta.contains(theta_value) && w.contains(w_value);
}

namespace {

Interval intersect(const Interval& a, const Interval& b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }
Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

// Conservative: the narrower arc contains the intersection.
Arc intersect(const Arc& a, const Arc& b) {
  if (a.full()) return b;
  if (b.full()) return a;
  return a.half_width <= b.half_width ? a : b;
}

// Smallest arc containing both, or the full circle.
Arc hull(const Arc& a, const Arc& b) {
  if (a.full() || b.full()) return Arc{};
  double delta = wrap_angle(b.center - a.center);  // b relative to a, in [0, 2π)
  if (delta > std::numbers::pi) delta -= kTwoPi;
  const double lo = std::min(-a.half_width, delta - b.half_width);
  const double hi = std::max(a.half_width, delta + b.half_width);
  const double half = 0.5 * (hi - lo);
  if (half >= std::numbers::pi) return Arc{};
  return Arc{wrap_angle(a.center + 0.5 * (lo + hi)), half};
}

}  // namespace

struct SymbolSpec::Node {
  enum class Kind { Bump, Constant, Shell, Product, Sum, Scale } kind = Kind::Constant;
  SymbolVar var = SymbolVar::Rho;
  double center = 0.0, outer = 1.0, inner = 0.0;
  double value = 0.0;
  PotentialModel model;
  double energy = 0.0;
  std::vector<std::shared_ptr<const Node>> children;

  double eval(double rho, double theta, double w) const {
    switch (kind) {
      case Kind::Bump: {
        double offset = 0.0;
        if (var == SymbolVar::Theta) {
          offset = circle_distance(theta, center);
        } else {
          offset = (var == SymbolVar::Rho ? rho : w) - center;
        }
        if (inner > 0.0) return plateau_bump(offset, inner, outer);
        return classic_bump(offset / outer);
      }
      case Kind::Constant: return value;
      case Kind::Shell: return rho * rho + w * w + model.v_inf(theta) - energy;
      case Kind::Product: {
        double p = 1.0;
        for (const auto& c : children) {
          p *= c->eval(rho, theta, w);
          if (p == 0.0) return 0.0;
        }
        return p;
      }
      case Kind::Sum: {
        double s = 0.0;
        for (const auto& c : children) s += c->eval(rho, theta, w);
        return s;
      }
      case Kind::Scale: return value * children.front()->eval(rho, theta, w);
    }
    return 0.0;
  }

  SupportBox box() const {
    switch (kind) {
      case Kind::Bump: {
        SupportBox b;
        if (var == SymbolVar::Theta) {
          b.theta = Arc{wrap_angle(center), outer};
        } else {
          Interval& target = var == SymbolVar::Rho ? b.rho : b.w;
          target = {center - outer, center + outer};
        }
        return b;
      }
      case Kind::Constant: {
        SupportBox b;
        if (value == 0.0) b.rho = {1.0, -1.0};
        return b;
      }
      case Kind::Shell: return SupportBox{};
      case Kind::Product: {
        SupportBox b;
        for (const auto& c : children) {
          const SupportBox cb = c->box();
          b.rho = intersect(b.rho, cb.rho);
          b.w = intersect(b.w, cb.w);
          b.theta = intersect(b.theta, cb.theta);
        }
        return b;
      }
      case Kind::Sum: {
        SupportBox b = children.front()->box();
        for (std::size_t i = 1; i < children.size(); ++i) {
          const SupportBox cb = children[i]->box();
          b.rho = hull(b.rho, cb.rho);
          b.w = hull(b.w, cb.w);
          b.theta = hull(b.theta, cb.theta);
        }
        return b;
      }
      case Kind::Scale: {
        if (value == 0.0) return Constant0Box();
        return children.front()->box();
      }
    }
    return SupportBox{};
  }

  static SupportBox Constant0Box() {
    SupportBox b;
    b.rho = {1.0, -1.0};
    return b;
  }
};

SymbolSpec SymbolSpec::bump(SymbolVar var, double center, double outer, double inner) {
  if (!(outer > 0.0)) throw std::invalid_argument("bump radius must be positive");
  if (inner < 0.0 || inner >= outer) throw std::invalid_argument("bump plateau must satisfy 0 <= inner < outer");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Bump;
  n->var = var;
  n->center = center;
  n->outer = outer;
  n->inner = inner;
  return SymbolSpec(std::move(n));
}

SymbolSpec SymbolSpec::bump3(double rho, double theta, double w, double radius) {
  return bump(SymbolVar::Rho, rho, radius) * bump(SymbolVar::Theta, theta, radius) * bump(SymbolVar::W, w, radius);
}

SymbolSpec SymbolSpec::plateau3(double rho, double theta, double w, double inner, double outer) {
  return bump(SymbolVar::Rho, rho, outer, inner) * bump(SymbolVar::Theta, theta, outer, inner) *
         bump(SymbolVar::W, w, outer, inner);
}

SymbolSpec SymbolSpec::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Constant;
  n->value = value;
  return SymbolSpec(std::move(n));
}

SymbolSpec SymbolSpec::shell_factor(const PotentialModel& model, double energy) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Shell;
  n->model = model;
  n->energy = energy;
  return SymbolSpec(std::move(n));
}

SymbolSpec SymbolSpec::operator*(const SymbolSpec& other) const {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Product;
  n->children = {node_, other.node_};
  return SymbolSpec(std::move(n));
}

SymbolSpec SymbolSpec::operator+(const SymbolSpec& other) const {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Sum;
  n->children = {node_, other.node_};
  return SymbolSpec(std::move(n));
}

SymbolSpec SymbolSpec::scaled(double factor) const {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Scale;
  n->value = factor;
  n->children = {node_};
  return SymbolSpec(std::move(n));
}

double SymbolSpec::operator()(double rho, double theta, double w) const { return node_->eval(rho, theta, w); }

SupportBox SymbolSpec::support_box() const { return node_->box(); }

bool SymbolSpec::theta_may_be_nonzero(double theta) const {
  const SupportBox b = node_->box();
  return b.rho.lo <= b.rho.hi && b.w.lo <= b.w.hi && b.theta.contains(theta);
}

bool SymbolSpec::is_zero() const {
  const SupportBox b = node_->box();
  return b.rho.lo > b.rho.hi || b.w.lo > b.w.hi;
}

double eval_symbol(const SymbolSpec& a, double rho, double theta, double w) { return a(rho, theta, w); }

}  // namespace semilab::core
