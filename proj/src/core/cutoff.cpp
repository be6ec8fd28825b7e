#include "semilab/core/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semilab/core/smooth.hpp"

namespace semilab::core {

double c_of_h(const std::vector<ResidualSample>& residual_table, double delta, double h) {
  if (residual_table.empty()) throw std::invalid_argument("c_of_h: residual table is empty");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("c_of_h: delta must lie in (0, 1]");
  bool covered = false;
  double c = 0.0;
  for (const auto& sample : residual_table) {
    if (!(sample.h > 0.0)) throw std::invalid_argument("c_of_h: table entries need h > 0");
    if (sample.h > h * (1.0 + 1e-12)) continue;
    covered = true;
    const double c0 = sample.residual_norm / sample.h;
    c = std::max({c, std::pow(sample.h, delta), std::pow(c0, delta)});
  }
  if (!covered) throw std::invalid_argument("c_of_h: residual table does not cover (0, h]");
  return c;
}

std::string to_string(CutoffKind kind) {
  switch (kind) {
    case CutoffKind::JStep: return "j-step";
    case CutoffKind::JLog: return "J-log";
    case CutoffKind::ChiLogWindow: return "chi-log-window";
    case CutoffKind::RWeighted: return "r-weighted";
    case CutoffKind::CustomSmooth: return "custom-smooth";
  }
  return "unknown";
}

CutoffKind cutoff_kind_from_string(const std::string& name) {
  if (name == "j-step") return CutoffKind::JStep;
  if (name == "J-log") return CutoffKind::JLog;
  if (name == "chi-log-window") return CutoffKind::ChiLogWindow;
  if (name == "r-weighted") return CutoffKind::RWeighted;
  if (name == "custom-smooth") return CutoffKind::CustomSmooth;
  throw std::invalid_argument("unknown cutoff kind '" + name + "'");
}

namespace {

// Largest epsilon for which f_h(r) = 0 on r ≤ epsilon holds for every admissible h.
double natural_epsilon(CutoffKind kind, const CutoffParams& params) {
  switch (kind) {
    case CutoffKind::JStep: return 0.5;
    case CutoffKind::JLog: return 1.0;          // log r ≤ ½ log c⁻¹ holds for r ≤ 1
    case CutoffKind::ChiLogWindow: return 1.0;  // χ(s) = 0 for s ≤ 1
    case CutoffKind::RWeighted: return 0.5;
    case CutoffKind::CustomSmooth: return 0.5 * params.window_lo;
  }
  return 0.5;
}

double chi_profile(double s) { return j_step(0.5 * s) * (1.0 - j_step(0.25 * s)); }

}  // namespace

CutoffFamily make_cutoff(CutoffKind kind, const CutoffParams& params, std::string id) {
  if (kind == CutoffKind::CustomSmooth && !(params.window_lo > 0.0 && params.window_hi > params.window_lo))
    throw std::invalid_argument("custom-smooth cutoff needs 0 < window_lo < window_hi");
  if (kind == CutoffKind::RWeighted && !(params.weight_support > 1.0))
    throw std::invalid_argument("r-weighted cutoff needs weight_support > 1");
  if ((kind == CutoffKind::JLog || kind == CutoffKind::ChiLogWindow) && !params.log_scale)
    throw std::invalid_argument(to_string(kind) + " cutoff requires log-scale parameters (delta, residual table)");
  if (params.log_scale && params.log_scale->residual_table.empty())
    throw std::invalid_argument("log-scale cutoff: residual table is empty");
  const double natural = natural_epsilon(kind, params);
  const double eps = params.epsilon.value_or(natural);
  if (!(eps > 0.0)) throw std::invalid_argument("cutoff epsilon must be positive");
  if (eps > natural + 1e-15)
    throw std::invalid_argument("cutoff epsilon exceeds the vanishing threshold of " + to_string(kind));
  CutoffFamily f;
  f.kind_ = kind;
  f.epsilon_ = eps;
  f.params_ = params;
  f.id_ = id.empty() ? to_string(kind) : std::move(id);
  return f;
}

double CutoffFamily::log_inverse_c(double h) const {
  if (!params_.log_scale) throw std::domain_error("cutoff has no log-scale parameters");
  const double c = c_of_h(params_.log_scale->residual_table, params_.log_scale->delta, h);
  if (!(c < 1.0)) throw std::domain_error("log-scale cutoff undefined: c(h) >= 1");
  return -std::log(c);
}

double CutoffFamily::evaluate(double h, double r) const {
  if (r <= epsilon_) return 0.0;
  switch (kind_) {
    case CutoffKind::JStep: return j_step(r);
    case CutoffKind::JLog: return j_step(std::log(r) / log_inverse_c(h));
    case CutoffKind::ChiLogWindow: return chi_profile(std::log(r) / log_inverse_c(h));
    case CutoffKind::RWeighted: {
      const double chi = j_step(r) * (1.0 - j_step(r / (2.0 * params_.weight_support)));
      return r * chi;
    }
    case CutoffKind::CustomSmooth:
      return j_step(r / params_.window_lo) * (1.0 - j_step(r / params_.window_hi));
  }
  return 0.0;
}

double CutoffFamily::sup_bound() const {
  if (kind_ == CutoffKind::RWeighted) return 2.0 * params_.weight_support;
  return 1.0;
}

}  // namespace semilab::core
