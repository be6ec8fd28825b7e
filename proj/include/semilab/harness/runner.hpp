#pragma once

#include <filesystem>
#include <iosfwd>

#include "semilab/harness/artifacts.hpp"
#include "semilab/harness/config.hpp"

namespace semilab::harness {

enum ExitCode : int { kPass = 0, kVerdictFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

struct RunResult {
  RunManifest manifest;
  int exit_code = kPass;
};

/// Runs the pipeline of `kind` (the config's kind when omitted), writing artifacts and
/// manifest.json into `out_dir`. Stage failures are recorded, not thrown; an unusable
/// output directory throws ConfigError before anything runs. Progress lines go to `log`
/// when given.
RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
              std::optional<ExperimentKind> kind = std::nullopt, std::ostream* log = nullptr);

}  // namespace semilab::harness
