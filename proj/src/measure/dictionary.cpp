#include "semilab/measure/dictionary.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "semilab/core/smooth.hpp"

namespace semilab::measure {

using core::SymbolSpec;

std::string to_string(SymbolTag tag) {
  switch (tag) {
    case SymbolTag::OnSupport: return "on-support";
    case SymbolTag::OffSupport: return "off-support";
    case SymbolTag::ShellProbe: return "shell-probe";
    case SymbolTag::ApproxIdentity: return "approx-identity";
  }
  return "unknown";
}

void SymbolDictionary::add(std::string name, SymbolTag tag, SymbolSpec symbol) {
  if (name.empty()) throw std::invalid_argument("dictionary: empty symbol name");
  for (const auto& e : entries_)
    if (e.name == name) throw std::invalid_argument("dictionary: duplicate symbol name '" + name + "'");
  entries_.push_back({std::move(name), tag, std::move(symbol)});
}

const DictionaryEntry& SymbolDictionary::find(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw std::out_of_range("dictionary: no symbol named '" + name + "'");
}

std::vector<SymbolSpec> SymbolDictionary::symbols() const {
  std::vector<SymbolSpec> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.symbol);
  return out;
}

SymbolDictionary default_dictionary(const core::PotentialModel& model, double energy, double theta0,
                                    const DictionaryOptions& opts) {
  SymbolDictionary d;
  const double r = opts.probe_radius;
  const auto crit = core::find_critical_points(model, opts.critical_tol);
  std::vector<double> directions;
  if (!crit.degenerate) {
    int idx = 0;
    for (const auto& c : crit.points) {
      const bool on = std::abs(c.value - energy) <= 1e-8;
      d.add("critical-" + std::to_string(idx++), on ? SymbolTag::OnSupport : SymbolTag::OffSupport,
            SymbolSpec::bump3(0.0, c.theta0, 0.0, r));
      directions.push_back(c.theta0);
    }
  }
  d.add("off-rho-plus", SymbolTag::OffSupport, SymbolSpec::bump3(opts.off_shell_rho, theta0, 0.0, r));
  d.add("off-rho-minus", SymbolTag::OffSupport, SymbolSpec::bump3(-opts.off_shell_rho, theta0, 0.0, r));
  d.add("off-w", SymbolTag::OffSupport, SymbolSpec::bump3(0.0, theta0, opts.off_shell_rho, r));

  // The direction farthest from θ₀ and every critical direction.
  directions.push_back(theta0);
  double best = theta0 + std::numbers::pi / 2, gap = -1.0;
  for (int s = 0; s < 720; ++s) {
    const double t = core::kTwoPi * s / 720.0;
    double m = 10.0;
    for (double c : directions) m = std::min(m, core::circle_distance(t, c));
    if (m > gap) gap = m, best = t;
  }
  d.add("non-critical", SymbolTag::OffSupport, SymbolSpec::bump3(0.0, best, 0.0, std::min(r, 0.5 * gap)));

  d.add("shell", SymbolTag::ShellProbe,
        SymbolSpec::bump3(0.0, theta0, 0.0, r) * SymbolSpec::shell_factor(model, energy));
  int k = 0;
  for (double inner : opts.identity_radii)
    d.add("identity-" + std::to_string(k++), SymbolTag::ApproxIdentity,
          SymbolSpec::plateau3(0.0, theta0, 0.0, inner, 2.0 * inner));
  return d;
}

}  // namespace semilab::measure
