#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace semilab::flow {

/// Dormand–Prince 5(4) with FSAL and the 4th-order continuous extension.
template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double step = 0.0;  // signed
  std::array<State<N>, 5> c{};

  State<N> eval(double t) const {
    const double s = (t - t0) / step;
    const double s1 = 1.0 - s;
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i)
      y[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
    return y;
  }
};

/// Piecewise polynomial solution over the accepted steps, in integration order.
template <std::size_t N>
class DenseOutput {
 public:
  void push(const DenseSegment<N>& seg) { segments_.push_back(seg); }
  bool empty() const { return segments_.empty(); }
  const std::vector<DenseSegment<N>>& segments() const { return segments_; }
  double t_begin() const { return segments_.front().t0; }
  double t_end() const { return segments_.back().t0 + segments_.back().step; }

  /// Evaluate at t inside the covered range (clamped to it).
  State<N> eval(double t) const { return segments_[locate(t)].eval(t); }

  std::size_t locate(double t) const {
    const bool forward = segments_.front().step > 0.0;
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t, [forward](const DenseSegment<N>& s, double x) {
      const double end = s.t0 + s.step;
      return forward ? end < x : end > x;
    });
    if (it == segments_.end()) return segments_.size() - 1;
    return static_cast<std::size_t>(it - segments_.begin());
  }

 private:
  std::vector<DenseSegment<N>> segments_;
};

struct StepControl {
  double atol = 1e-10;
  double rtol = 1e-10;
  double initial_step = 0.0;  // 0: automatic
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
};

enum class StepOutcome { Finished, Stopped, StepUnderflow, TooManySteps };

struct IntegrationSummary {
  StepOutcome outcome = StepOutcome::Finished;
  double t_reached = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Integrate y' = f(t, y) from t0 to t1 (either direction). After every accepted
/// step `on_step(segment, k_end)` is called; returning false stops the run early.
template <std::size_t N, typename Rhs, typename OnStep>
IntegrationSummary dopri5(Rhs&& f, double t0, State<N> y, double t1, const StepControl& ctl, OnStep&& on_step) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  IntegrationSummary summary;
  summary.t_reached = t0;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0) return summary;

  auto axpy = [](const State<N>& base, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = base;
    for (const auto& [coef, k] : terms)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
    return out;
  };

  State<N> k1 = f(t0, y);
  double h = ctl.initial_step;
  if (!(h > 0.0)) {
    // Hairer's starting-step heuristic.
    double d0 = 0.0, dd1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.atol + ctl.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      dd1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    dd1 = std::sqrt(dd1 / N);
    h = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h = std::min({h, span, ctl.max_step});
  }

  double t = t0;
  double err_prev = 1e-4;
  bool last_rejected = false;
  while (true) {
    const double remaining = std::abs(t1 - t);
    if (remaining <= 1e-14 * std::max(1.0, std::abs(t1))) {
      summary.outcome = StepOutcome::Finished;
      break;
    }
    if (summary.accepted + summary.rejected >= ctl.max_steps) {
      summary.outcome = StepOutcome::TooManySteps;
      break;
    }
    h = std::min({h, remaining, ctl.max_step});
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      summary.outcome = StepOutcome::StepUnderflow;
      break;
    }
    const double hs = dir * h;
    const State<N> y2 = axpy(y, hs, {{a21, &k1}});
    const State<N> k2 = f(t + c2 * hs, y2);
    const State<N> y3 = axpy(y, hs, {{a31, &k1}, {a32, &k2}});
    const State<N> k3 = f(t + c3 * hs, y3);
    const State<N> y4 = axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    const State<N> k4 = f(t + c4 * hs, y4);
    const State<N> y5 = axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    const State<N> k5 = f(t + c5 * hs, y5);
    const State<N> y6 = axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    const State<N> k6 = f(t + hs, y6);
    const State<N> ynew = axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State<N> k7 = f(t + hs, ynew);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
      finite = finite && std::isfinite(ynew[i]);
    }
    err = finite ? std::sqrt(err / N) : std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      DenseSegment<N> seg;
      seg.t0 = t;
      seg.step = hs;
      for (std::size_t i = 0; i < N; ++i) {
        seg.c[0][i] = y[i];
        seg.c[1][i] = ynew[i] - y[i];
        seg.c[2][i] = hs * k1[i] - seg.c[1][i];
        seg.c[3][i] = seg.c[1][i] - hs * k7[i] - seg.c[2][i];
        seg.c[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      t = (remaining - h <= 1e-14 * std::max(1.0, std::abs(t1))) ? t1 : t + hs;
      y = ynew;
      k1 = k7;
      ++summary.accepted;
      summary.t_reached = t;
      if (!on_step(seg, k7)) {
        summary.outcome = StepOutcome::Stopped;
        break;
      }
      // PI controller (beta = 0.04).
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.2 + 0.04 * 0.75) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      err_prev = e;
      last_rejected = false;
    } else {
      ++summary.rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      last_rejected = true;
    }
  }
  return summary;
}

}  // namespace semilab::flow
