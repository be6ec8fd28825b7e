#pragma once

#include <string>
#include <vector>

#include "semilab/core/potential.hpp"
#include "semilab/core/symbol.hpp"

namespace semilab::measure {

/// Expected limit of a probe for a family concentrating at (0, θ₀, 0).
enum class SymbolTag {
  OnSupport,       ///< bump at (0, θ₀, 0) with V∞(θ₀) = E; limit positive
  OffSupport,      ///< disjoint from the predicted support; limit 0
  ShellProbe,      ///< bump·(ρ² + w² + V∞ − E); limit 0 on the energy shell
  ApproxIdentity,  ///< flat-top bumps around (0, θ₀, 0), nested; limits bound the mass there
};

std::string to_string(SymbolTag tag);

struct DictionaryEntry {
  std::string name;
  SymbolTag tag = SymbolTag::OffSupport;
  core::SymbolSpec symbol;
};

class SymbolDictionary {
 public:
  /// Throws std::invalid_argument on a duplicate or empty name.
  void add(std::string name, SymbolTag tag, core::SymbolSpec symbol);
  const std::vector<DictionaryEntry>& entries() const { return entries_; }
  /// Throws std::out_of_range for unknown names.
  const DictionaryEntry& find(const std::string& name) const;
  std::vector<core::SymbolSpec> symbols() const;

 private:
  std::vector<DictionaryEntry> entries_;
};

struct DictionaryOptions {
  double probe_radius = 0.5;
  /// Plateau radii of the approximate identity, widest first; outer radius is twice the inner.
  std::vector<double> identity_radii = {1.0, 0.6, 0.35};
  double off_shell_rho = 1.0;
  double critical_tol = 1e-9;
};

/// Probes for a family concentrating at (0, θ₀, 0) on the level E: bumps at every critical
/// direction (on-support iff V∞ = E there), off-shell bumps at ρ ≠ 0 and w ≠ 0, a bump at a
/// non-critical direction, a shell probe and the approximate-identity sequence.
SymbolDictionary default_dictionary(const core::PotentialModel& model, double energy, double theta0,
                                    const DictionaryOptions& opts = {});

}  // namespace semilab::measure
