#pragma once

#include <optional>
#include <string>
#include <vector>

namespace semilab::core {

/// One measured residual ‖R_h‖ of a quasimode family.
struct ResidualSample {
  double h = 0.0;
  double residual_norm = 0.0;
};

/// Running envelope c(h) = max_{h̃ ≤ h} max(h̃^δ, c₀(h̃)^δ) with c₀(h̃) = ‖R_h̃‖/h̃,
/// taken over the tabulated h̃. Throws std::invalid_argument on an empty table,
/// δ ∉ (0,1], or when no entry satisfies h̃ ≤ h.
double c_of_h(const std::vector<ResidualSample>& residual_table, double delta, double h);

enum class CutoffKind { JStep, JLog, ChiLogWindow, RWeighted, CustomSmooth };

std::string to_string(CutoffKind kind);
/// Accepts "j-step", "J-log", "chi-log-window", "r-weighted", "custom-smooth".
CutoffKind cutoff_kind_from_string(const std::string& name);

struct LogScaleParams {
  double delta = 0.5;
  std::vector<ResidualSample> residual_table;
};

struct CutoffParams {
  /// Vanishing threshold; defaults to the natural one of the kind and may not exceed it.
  std::optional<double> epsilon;
  /// Required by J-log and chi-log-window.
  std::optional<LogScaleParams> log_scale;
  /// r-weighted: r·χ̃(r) with χ̃(x) = j(x)(1 - j(x/(2C))).
  double weight_support = 2.0;
  /// custom-smooth window j(r/lo)(1 - j(r/hi)).
  double window_lo = 1.0;
  double window_hi = 2.0;
};

/// An admissible h-family f_h(r): vanishes for r ≤ epsilon with h-uniform
/// derivative bounds. Immutable; evaluate() is a pure function.
class CutoffFamily {
 public:
  CutoffKind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }
  const CutoffParams& params() const noexcept { return params_; }
  const std::string& id() const noexcept { return id_; }

  /// f_h(r). Log-scale kinds throw std::domain_error when c(h) ≥ 1.
  double evaluate(double h, double r) const;
  /// log c(h)^{-1} for log-scale kinds.
  double log_inverse_c(double h) const;
  /// Upper bound of f_h on r ≥ 0 (1 except for r-weighted).
  double sup_bound() const;

 private:
  friend CutoffFamily make_cutoff(CutoffKind, const CutoffParams&, std::string);
  CutoffKind kind_ = CutoffKind::JStep;
  double epsilon_ = 0.5;
  CutoffParams params_;
  std::string id_;
};

/// Throws std::invalid_argument if epsilon ≤ 0, epsilon exceeds the kind's natural
/// vanishing threshold, or log-scale parameters are missing.
CutoffFamily make_cutoff(CutoffKind kind, const CutoffParams& params = {}, std::string id = "");

}  // namespace semilab::core
