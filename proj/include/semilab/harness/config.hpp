#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semilab/core/potential.hpp"
#include "semilab/flow/induced_flow.hpp"
#include "semilab/quasimodes/quasimode.hpp"

namespace semilab::harness {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { Flow, Quasimode, Pairings, Observability, Gaarding, Suite };
std::string to_string(ExperimentKind kind);
/// Accepts flow, quasimode, pairings, observability, gaarding, suite (alias full-suite).
std::optional<ExperimentKind> kind_from_string(const std::string& name);

struct FlowSection {
  double tol = 1e-10;
  double t_end = 200.0;
  int output_samples = 2001;
  std::vector<flow::PhasePoint> initial_conditions;
  int random_count = 20;  ///< used when no initial conditions are listed
};

struct QuasimodeSection {
  int case_id = 1;
  std::optional<int> k;  ///< defaults to the critical order at theta0
  double epsilon = 0.1;
  double theta0 = 0.0;
  std::optional<double> energy;  ///< required for case 2
  std::vector<double> h_list = {0.2, 0.1, 0.05, 0.025};
  bool export_field = false;
};

struct PairingsSection {
  std::vector<double> h_list = {0.2, 0.1, 0.05, 0.025};
  std::string cutoff = "j-step";
  double delta = 0.5;
  double max_spacing = 0.45;
  double box_factor = 1.3;
  int stride = 1;
};

struct ObservabilitySection {
  std::vector<double> h_list = {0.1, 0.07, 0.05};
  double C = 1.5;
  std::optional<double> exponent;  ///< defaults to 1/(k+1)
  double R = 1.0;
  double T = 1.0;
  double dt = 0.005;
  double half_width = 64.0;
  int points = 512;
};

struct GaardingSection {
  std::vector<double> h_list = {0.2, 0.1, 0.05};
  int points = 32;
  int trials = 20;
  double rho = 0.0, theta = 0.0, w = 0.0, radius = 1.0;  ///< test symbol bump3(ρ, θ, w, radius)
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::optional<ExperimentKind> kind;
  nlohmann::ordered_json potential_record;  ///< as given (preset or modes)
  core::PotentialModel model = core::PotentialModel::degenerate_quartic();
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double tol = 0.1;  ///< verdict tolerance
  FlowSection flow;
  QuasimodeSection quasimode;
  PairingsSection pairings;
  ObservabilitySection observability;
  GaardingSection gaarding;

  /// Every field with defaults filled in; the record written next to the artifacts.
  nlohmann::ordered_json resolved() const;
};

/// Validates against the schema. Errors are ConfigError carrying the field path; unknown
/// keys are rejected with the closest allowed name as a suggestion.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Throws ConfigError when the file is missing or not valid JSON.
ExperimentConfig load_config(const std::filesystem::path& path);

/// The quasimode family of the config, validated against its potential.
quasimodes::QuasimodeSpec quasimode_spec(const ExperimentConfig& cfg);
/// Collar exponent of the observability region: configured value or 1/(k+1).
double observability_exponent(const ExperimentConfig& cfg);

/// Closest candidate by edit distance, or empty when none is within distance 3.
std::string closest_key(const std::string& key, const std::vector<std::string>& candidates);

}  // namespace semilab::harness
